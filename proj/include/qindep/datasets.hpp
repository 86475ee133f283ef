#pragma once

// Embedded example sets and their verification.
//
// lattice-3x6x9-85: nine horizontal layers of the 3x6x9 lattice, each a 3x6
// grid numbered 1..18 row-major (rows of 6). Layer l, entry v decodes to the
// coordinates (row, column, layer) = ((v-1)/6, (v-1)%6, l). The source lists
// the set twice; the by-layer listing ends layer 8 with "..., 14, 1", which is
// kept as two readings, and the lexicographic listing is a third reading.
//
// cyclic-105-52: a 52-element quasi-independent subset of Z_105 found by a
// local search over its seven Z_15-slices.

#include <optional>
#include <string>
#include <vector>

#include "qindep/group.hpp"
#include "qindep/relations.hpp"

namespace qindep {

struct DatasetReading {
  std::string name;
  std::string description;
  Subset set;
};

struct Dataset {
  std::string name;
  std::string description;
  GroupSpec group;
  std::size_t expected_size = 0;
  std::vector<DatasetReading> readings;
};

namespace detail {

inline const std::vector<std::vector<int>>& lattice_369_layers() {
  static const std::vector<std::vector<int>> layers = {
      {1, 2, 3, 4, 7, 8, 9, 11, 18},
      {1, 3, 8, 10, 12, 13, 14, 15, 17, 18},
      {3, 4, 5, 6, 8, 9, 10, 11, 13},
      {2, 3, 8, 9, 10, 11, 12, 13, 16, 17},
      {1, 3, 4, 6, 9, 10, 11, 12, 14},
      {1, 2, 3, 4, 5, 7, 8, 12, 15, 17},
      {1, 3, 5, 6, 7, 8, 11, 12, 16},
      {2, 3, 4, 5, 6, 7, 9, 11, 14, 1},
      {1, 2, 4, 5, 7, 8, 9, 10, 18},
  };
  return layers;
}

inline const std::vector<int>& lattice_369_lexicographic() {
  static const std::vector<int> v = {
      1,   2,   3,   4,   7,   8,   9,   11,  18,  21,  22,  23,  24,  26,  27,  28,  29,
      31,  37,  39,  40,  42,  45,  46,  47,  48,  50,  55,  56,  58,  59,  61,  62,  63,
      64,  72,  73,  75,  77,  78,  79,  80,  83,  84,  88,  92,  93,  94,  95,  96,  97,
      99,  101, 104, 106, 109, 110, 111, 112, 113, 115, 116, 120, 123, 125, 128, 129, 134,
      135, 136, 137, 138, 139, 142, 143, 145, 147, 152, 154, 156, 157, 158, 159, 161, 162};
  return v;
}

inline const std::vector<Element>& cyclic_105_52() {
  static const std::vector<Element> v = {
      0,  1,  4,  10, 20, 22, 26, 27, 28, 30, 31, 32, 34, 37, 38, 40, 41, 43,
      44, 47, 48, 49, 50, 51, 53, 54, 55, 59, 61, 63, 66, 67, 68, 70, 71, 77,
      78, 79, 81, 84, 86, 87, 88, 91, 92, 93, 94, 95, 97, 99, 100, 103};
  return v;
}

/// Global numbering 1..162 (18 per layer) to a lattice element.
inline Element decode_369(const GroupSpec& g, int v) {
  const int i = v - 1;
  return g.index({(i % 18) / 6, i % 6, i / 18});
}

inline Dataset make_lattice_369() {
  Dataset d{"lattice-3x6x9-85",
            "85-element set in the 3x6x9 lattice, layer-encoded",
            GroupSpec::lattice({3, 6, 9}),
            85,
            {}};
  const auto& layers = lattice_369_layers();
  auto by_layers = [&](bool keep_trailing_one) {
    std::vector<Element> e;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      for (std::size_t i = 0; i < layers[l].size(); ++i) {
        if (l == 7 && i == 9 && !keep_trailing_one) continue;
        e.push_back(decode_369(d.group, layers[l][i] + 18 * static_cast<int>(l)));
      }
    }
    return Subset(d.group, std::move(e));
  };
  d.readings.push_back({"by-layers-9", "layer 8 read as {2,3,4,5,6,7,9,11,14} (trailing 1 dropped)",
                        by_layers(false)});
  d.readings.push_back({"by-layers-10", "layer 8 read as {1,2,3,4,5,6,7,9,11,14} (trailing 1 kept)",
                        by_layers(true)});
  std::vector<Element> lex;
  for (int v : lattice_369_lexicographic()) lex.push_back(decode_369(d.group, v));
  d.readings.push_back({"lexicographic", "the lexicographic listing of the same example",
                        Subset(d.group, std::move(lex))});
  return d;
}

}  // namespace detail

inline std::vector<std::string> dataset_names() { return {"lattice-3x6x9-85", "cyclic-105-52"}; }

inline Dataset dataset(const std::string& name) {
  if (name == "lattice-3x6x9-85") return detail::make_lattice_369();
  if (name == "cyclic-105-52") {
    const auto g = GroupSpec::cyclic(105);
    return {name, "52-element quasi-independent subset of Z_105", g, 52,
            {{"witness", "as embedded", Subset(g, detail::cyclic_105_52())}}};
  }
  throw InvalidInput("unknown dataset '" + name + "'");
}

/// Layer `l` (0-based) of the 3x6x9 by-layer listing, as printed (1..18).
inline std::vector<int> lattice_369_layer(std::size_t l) { return detail::lattice_369_layers().at(l); }

struct ReadingReport {
  std::string name;
  std::string description;
  std::size_t size = 0;
  Decision quasi_independent = Decision::undecided;
  std::optional<Relation> witness;
  Subset set;
};

struct DatasetReport {
  std::string name;
  GroupSpec group;
  std::size_t expected_size = 0;
  std::vector<ReadingReport> readings;
  std::optional<std::string> accepted;  // first reading of the expected size that is quasi-independent
};

inline DatasetReport verify_dataset(const std::string& name, const Budget& budget = {}) {
  const Dataset d = dataset(name);
  DatasetReport r{d.name, d.group, d.expected_size, {}, std::nullopt};
  for (const auto& rd : d.readings) {
    const auto v = is_quasi_independent(rd.set, budget);
    r.readings.push_back({rd.name, rd.description, rd.set.size(), v.quasi_independent, v.quasi_witness, rd.set});
    if (!r.accepted && rd.set.size() == d.expected_size && v.quasi_independent == Decision::yes) {
      r.accepted = rd.name;
    }
  }
  return r;
}

}  // namespace qindep
