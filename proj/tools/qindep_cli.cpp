// qindep: command-line front end.
//
// Exit codes: 0 affirmative, 1 negative with a witness, 2 undecided or budget
// exhausted, 3 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qindep/certificate.hpp"
#include "qindep/qindep.hpp"

using namespace qindep;
using nlohmann::json;

namespace {

constexpr int kYes = 0, kNo = 1, kUndecided = 2, kUsage = 3;

struct Global {
  bool json_out = false;
  std::size_t dim_cap = Budget{}.dim_cap;
  std::uint64_t node_cap = Budget{}.node_cap;
  std::uint64_t search_nodes = SearchBudget{}.node_cap;
  double time_cap = 0;
  std::string table_path;
  bool no_table = false;

  Budget budget() const { return {dim_cap, node_cap}; }
  SearchBudget search() const {
    SearchBudget b;
    b.node_cap = search_nodes;
    b.time_cap_seconds = time_cap;
    b.tester = budget();
    return b;
  }
  std::string table() const {
    if (!table_path.empty()) return table_path;
    if (const char* dir = std::getenv("QINDEP_CACHE_DIR"); dir && *dir) {
      return (std::filesystem::path(dir) / "psi-table.json").string();
    }
    return "psi-table.json";
  }
};

int code_for(Decision d) { return d == Decision::yes ? kYes : d == Decision::no ? kNo : kUndecided; }

void emit(const Global& g, const json& j, const std::string& human) {
  if (g.json_out) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << human;
  }
}

std::string psi_line(const PsiEntry& e) {
  std::string s = "Psi(" + e.group.name() + ") " + (e.exact() ? "= " : ">= ") + std::to_string(e.value) + " (" +
                  to_string(e.status) + ", " + e.provenance.kind;
  if (!e.provenance.detail.empty()) s += ": " + e.provenance.detail;
  s += ")";
  if (e.group.is_cyclic()) {
    const auto d = e.value - euler_phi(e.group.order());
    s += ", phi + " + std::to_string(d);
  }
  return s + "\n";
}

// --- test -----------------------------------------------------------------

int cmd_test(const Global& g, const std::string& subset, const std::string& cert_in, const std::string& cert_out) {
  if (!cert_in.empty()) {
    std::ifstream in(cert_in);
    if (!in) throw InvalidInput("cannot read certificate " + cert_in);
    json j;
    in >> j;
    const auto c = verify_certificate(j, g.budget());
    emit(g, {{"certificate", cert_in}, {"verified", c.ok}, {"message", c.message}},
         std::string(c.ok ? "certificate verified: " : "certificate REJECTED: ") + c.message + "\n");
    return c.ok ? kYes : kNo;
  }
  const Subset e = parse_subset(subset);
  const auto v = is_quasi_independent(e, g.budget());
  const json cert = make_certificate(e, v);
  if (!cert_out.empty()) {
    std::ofstream out(cert_out);
    if (!out) throw InvalidInput("cannot write certificate " + cert_out);
    out << cert.dump(2) << '\n';
  }
  std::string human;
  switch (v.quasi_independent) {
    case Decision::yes: human = "quasi-independent"; break;
    case Decision::no: human = "not quasi-independent"; break;
    case Decision::undecided: human = "undecided (budget exhausted)"; break;
  }
  human += v.independent ? ", independent" : ", not independent";
  human += " [" + std::string(to_string(v.method)) + ", nodes " + std::to_string(v.nodes) + "]\n";
  if (v.quasi_witness) human += "quasi-relation: " + v.quasi_witness->str() + "\n";
  if (v.relation_witness && !v.quasi_witness) human += "relation: " + v.relation_witness->str() + "\n";
  emit(g, cert, human);
  return code_for(v.quasi_independent);
}

// --- basis ----------------------------------------------------------------

int cmd_basis(const Global& g, const std::string& group) {
  const GroupSpec gs = GroupSpec::parse(group);
  const auto b = basis_for(gs);
  json j{{"group", gs.name()}, {"dimension", b->vectors.size()}, {"expected", gs.order() - gs.free_rank()}};
  j["vectors"] = json::array();
  std::string human = "relation space of " + gs.name() + ": dimension " + std::to_string(b->vectors.size()) + "\n";
  for (const auto& v : b->vectors) {
    json terms = json::array();
    std::string line;
    for (const auto& [x, c] : v.terms) {
      terms.push_back({x, c.str()});
      line += (line.empty() ? "" : " ") + element_to_string(gs, x) + ":" + c.str();
    }
    j["vectors"].push_back(terms);
    human += "  " + line + "\n";
  }
  emit(g, j, human);
  return kYes;
}

// --- psi ------------------------------------------------------------------

int cmd_psi(const Global& g, const std::string& group, bool long_run, bool no_identities) {
  const GroupSpec gs = GroupSpec::parse(group);
  PsiTable table = g.no_table ? PsiTable{} : PsiTable::load(g.table());
  PsiOptions opt;
  opt.use_identities = !no_identities;
  opt.long_run = long_run;
  opt.search = g.search();
  opt.long_run_search = g.search();
  if (long_run && g.search_nodes == SearchBudget{}.node_cap) opt.long_run_search.node_cap = PsiOptions{}.long_run_search.node_cap;
  opt.table = &table;
  const PsiEntry e = psi(gs, opt);
  if (!g.no_table) table.save(g.table());
  emit(g, to_json(e), psi_line(e));
  return e.exact() ? kYes : kUndecided;
}

// --- extend ---------------------------------------------------------------

int cmd_extend(const Global& g, const std::string& subset, std::size_t s, std::int64_t q) {
  const Subset e = parse_subset(subset);
  if (!e.group().is_cyclic()) throw InvalidInput("extend: cyclic groups only");
  const auto primes = e.group().primes();
  if (s < 1 || s > primes.size()) throw InvalidInput("extend: --s must be between 1 and the number of primes");
  ExtensionPlan plan;
  plan.n = e.group().order();
  plan.s = s;
  plan.p_s = primes[s - 1];
  plan.q = q;
  plan.m = plan.n / plan.p_s;
  std::vector<Element> fill = {0};
  plan.psi_m = 1;
  if (plan.m >= 2) {
    const PsiEntry pm = psi(GroupSpec::cyclic(plan.m));
    if (!pm.exact()) throw InvalidInput("extend: Psi(" + std::to_string(plan.m) + ") is not known exactly");
    fill = pm.witness;
    plan.psi_m = pm.value;
  }
  plan.fill.assign(static_cast<std::size_t>(std::max<std::int64_t>(q - plan.p_s, 0)), fill);
  const Subset r = extend(e, plan, true, g.budget());
  emit(g, {{"input", to_string(e)}, {"result", to_string(r)}, {"size", r.size()}, {"verified", true}},
       to_string(r) + "\n" + "size " + std::to_string(e.size()) + " -> " + std::to_string(r.size()) +
           ", quasi-independent (verified)\n");
  return kYes;
}

// --- permutations ---------------------------------------------------------

int cmd_perm_check(const Global& g, const std::string& text, std::size_t battery) {
  const Perm p = Perm::parse(text);
  const bool exhaustive = battery == 0 && p.order() <= kExhaustiveLimit;
  BatteryOptions bo;
  bo.budget = g.budget();
  if (battery) bo.random_samples = battery;
  const auto r = exhaustive ? preserves_qi_exhaustive(p) : preserves_qi_battery(p, bo);
  json j{{"perm", p.str()}, {"mode", exhaustive ? "exhaustive" : "battery"}, {"preserves", r.preserves},
         {"checked", r.checked}, {"undecided", r.undecided}, {"coset_structured", is_coset_structured(p)}};
  std::string human;
  if (!r.preserves) {
    const Subset& c = *r.counterexample;
    j["counterexample"] = to_string(c);
    j["image"] = to_string(p.apply(c));
    human = "does not preserve quasi-independence: " + to_string(c) + " -> " + to_string(p.apply(c)) + "\n";
    emit(g, j, human);
    return kNo;
  }
  human = exhaustive ? "preserves quasi-independence (exhaustive over all subsets)\n"
                     : "no counterexample in " + std::to_string(r.checked) + " battery probes (evidence only)\n";
  emit(g, j, human);
  return exhaustive ? kYes : kUndecided;
}

int cmd_perm_classify(const Global& g, const std::string& text) {
  const Perm p = Perm::parse(text);
  const auto f = classify(p);
  if (!f) {
    json j{{"perm", p.str()}, {"factorization", nullptr}};
    std::string human = "no factorization: the permutation does not have the required coset structure\n";
    if (p.order() <= kExhaustiveLimit) {
      const auto r = preserves_qi_exhaustive(p);
      if (r.counterexample) {
        j["counterexample"] = to_string(*r.counterexample);
        human += "counterexample: " + to_string(*r.counterexample) + "\n";
      }
    }
    emit(g, j, human);
    return kNo;
  }
  const json j{{"perm", p.str()}, {"factorization", to_json(*f)}};
  emit(g, j, to_json(*f).dump(2) + "\n");
  return kYes;
}

// --- datasets -------------------------------------------------------------

int cmd_verify_dataset(const Global& g, const std::string& name) {
  const auto r = verify_dataset(name, g.budget());
  json j{{"dataset", r.name}, {"group", r.group.name()}, {"expected_size", r.expected_size}};
  j["readings"] = json::array();
  std::string human = r.name + " in " + r.group.name() + " (expected size " + std::to_string(r.expected_size) + ")\n";
  for (const auto& rd : r.readings) {
    json o{{"name", rd.name}, {"description", rd.description}, {"size", rd.size},
           {"verdict", verdict_name(rd.quasi_independent)}};
    human += "  " + rd.name + ": size " + std::to_string(rd.size) + ", " + verdict_name(rd.quasi_independent);
    if (rd.witness) {
      o["witness"] = rd.witness->str();
      human += ", quasi-relation " + rd.witness->str();
    }
    human += "  [" + rd.description + "]\n";
    j["readings"].push_back(o);
  }
  j["accepted"] = r.accepted ? json(*r.accepted) : json(nullptr);
  human += r.accepted ? "accepted reading: " + *r.accepted + "\n" : "no reading has the expected size and is quasi-independent\n";
  emit(g, j, human);
  return r.accepted ? kYes : kNo;
}

// --- bounds ---------------------------------------------------------------

int cmd_bounds(const Global& g, std::int64_t n, std::size_t s, std::int64_t q) {
  PsiTable table = g.no_table ? PsiTable{} : PsiTable::load(g.table());
  PsiOptions opt;
  opt.search = g.search();
  const auto bs = monotonicity_bounds(n, s, q, &table, opt);
  if (!g.no_table) table.save(g.table());
  json j = json::array();
  std::string human;
  for (const auto& b : bs) {
    j.push_back({{"rule", b.rule}, {"entry", to_json(b.entry)}});
    human += b.rule + ": " + psi_line(b.entry);
  }
  emit(g, j, human);
  return kYes;
}

// --- selftest -------------------------------------------------------------

int cmd_selftest(const Global& g) {
  std::size_t failures = 0;
  std::string human;
  auto report = [&](const std::string& name, std::size_t bad, const std::string& detail) {
    failures += bad;
    human += (bad ? "FAIL " : "ok   ") + name + ": " + detail + "\n";
  };
  // Oracle equivalence on small groups.
  {
    std::size_t bad = 0, checked = 0;
    for (std::int64_t n = 3; n <= 14; ++n) {
      const auto gs = GroupSpec::cyclic(n);
      const auto t = QiTable::build(gs);
      for (std::uint64_t mask = 0; mask < t.size(); ++mask) {
        if (__builtin_popcountll(mask) > 8) continue;
        const Subset e = Subset::from_mask(gs, mask);
        const auto a = is_quasi_independent(e, g.budget()).quasi_independent;
        const auto b = coset_reduction_test(e, g.budget()).quasi_independent;
        const Decision want = t.quasi_independent(mask) ? Decision::yes : Decision::no;
        bad += (a != want) + (b != want);
        ++checked;
      }
    }
    report("oracle equivalence", bad, std::to_string(checked) + " subsets of Z_3..Z_14");
  }
  // Identities against direct search.
  {
    std::size_t bad = 0;
    PsiOptions direct;
    direct.use_identities = false;
    for (std::int64_t n = 2; n <= 30; ++n) {
      const auto a = psi(GroupSpec::cyclic(n));
      const auto b = psi(GroupSpec::cyclic(n), direct);
      bad += !(a.exact() && b.exact() && a.value == b.value);
    }
    report("Psi identities", bad, "n = 2..30, identities vs direct search");
  }
  // Permutations: classification agrees with preservation.
  {
    std::size_t bad = 0, total = 0;
    for (std::int64_t n = 2; n <= 7; ++n) {
      const auto gs = GroupSpec::cyclic(n);
      std::vector<Element> img(static_cast<std::size_t>(n));
      std::iota(img.begin(), img.end(), 0);
      do {
        const Perm p(gs, img);
        bad += preserves_qi_exhaustive(p).preserves != classify(p).has_value();
        ++total;
      } while (std::next_permutation(img.begin(), img.end()));
    }
    report("permutation classification", bad, std::to_string(total) + " permutations of Z_2..Z_7");
  }
  emit(g, {{"failures", failures}, {"report", human}}, human);
  return failures ? kNo : kYes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qindep: quasi-independence of roots of unity"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a TOML/INI file");
  Global g;
  app.add_flag("--json", g.json_out, "machine-readable output");
  app.add_option("--dim-cap", g.dim_cap, "largest relation subspace enumerated by the tester")->capture_default_str();
  app.add_option("--node-cap", g.node_cap, "node cap for one sign enumeration")->capture_default_str();
  app.add_option("--search-nodes", g.search_nodes, "node cap for branch-and-bound")->capture_default_str();
  app.add_option("--time-cap", g.time_cap, "seconds for branch-and-bound (0: none)")->capture_default_str();
  app.add_option("--table", g.table_path, "Psi table path (default $QINDEP_CACHE_DIR/psi-table.json or ./psi-table.json)");
  app.add_flag("--no-table", g.no_table, "neither read nor write the Psi table");

  std::string subset, cert_in, cert_out, group, perm, name;
  bool long_run = false, no_identities = false;
  std::size_t s = 0, battery = 0;
  std::int64_t q = 0, n = 0;

  auto* test = app.add_subcommand("test", "decide (quasi-)independence of a subset");
  test->add_option("subset", subset, "e.g. 15:3,5,6 or 3x6:(0,1),(1,2)");
  test->add_option("--certificate", cert_in, "re-verify a certificate file instead");
  test->add_option("--emit-certificate", cert_out, "write a certificate for the verdict");

  auto* basis = app.add_subcommand("basis", "print the structured basis of the relation space");
  basis->add_option("group", group, "e.g. 12 or 3x3")->required();

  auto* psi_cmd = app.add_subcommand("psi", "compute or bound Psi");
  psi_cmd->add_option("group", group, "e.g. 105 or 3x3x3")->required();
  psi_cmd->add_flag("--long-run", long_run, "allow exhaustive search on large groups");
  psi_cmd->add_flag("--no-identities", no_identities, "direct search only");

  auto* ext = app.add_subcommand("extend", "extend a quasi-independent set of Z_n to Z_{qm}");
  ext->add_option("subset", subset, "quasi-independent subset of a square-free Z_n")->required();
  ext->add_option("--s", s, "1-based index of the replaced prime")->required();
  ext->add_option("--q", q, "the new prime")->required();

  auto* pc = app.add_subcommand("perm-check", "test whether a permutation preserves quasi-independence");
  pc->add_option("perm", perm, "n:image list")->required();
  pc->add_option("--battery", battery, "battery mode with this many random probes");

  auto* pcl = app.add_subcommand("perm-classify", "factor a permutation into the structured types");
  pcl->add_option("perm", perm, "n:image list")->required();

  auto* vd = app.add_subcommand("verify-dataset", "decode and verify an embedded dataset");
  vd->add_option("name", name, "lattice-3x6x9-85 or cyclic-105-52")->required();

  auto* bd = app.add_subcommand("bounds", "propagate lower bounds from Z_n to Z_{qm} and Z_{nq}");
  bd->add_option("n", n, "square-free n")->required();
  bd->add_option("--s", s, "1-based index of the replaced prime")->required();
  bd->add_option("--q", q, "the new prime")->required();

  auto* st = app.add_subcommand("selftest", "oracle, identity and permutation suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }
  try {
    if (*test) {
      if (subset.empty() == cert_in.empty()) throw InvalidInput("test: give a subset or --certificate");
      return cmd_test(g, subset, cert_in, cert_out);
    }
    if (*basis) return cmd_basis(g, group);
    if (*psi_cmd) return cmd_psi(g, group, long_run, no_identities);
    if (*ext) return cmd_extend(g, subset, s, q);
    if (*pc) return cmd_perm_check(g, perm, battery);
    if (*pcl) return cmd_perm_classify(g, perm);
    if (*vd) return cmd_verify_dataset(g, name);
    if (*bd) return cmd_bounds(g, n, s, q);
    if (*st) return cmd_selftest(g);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
