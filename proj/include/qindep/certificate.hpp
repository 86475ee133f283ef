#pragma once

// Verdict certificates as JSON, and their re-verification.
//
// A negative verdict carries its quasi-relation; re-verification checks it
// with the cyclotomic remainder (cyclic) or the mean-removal test (lattice),
// neither of which uses the structured basis. A positive verdict has no
// witness, so it is re-derived by both deciders and, for small sets, the
// brute-force oracle.

#include <string>

#include <nlohmann/json.hpp>

#include "qindep/cyclotomic.hpp"
#include "qindep/group.hpp"
#include "qindep/relations.hpp"
#include "qindep/version.hpp"

namespace qindep {

inline constexpr const char* kCertificateSchema = "qindep-certificate/1";

inline const char* verdict_name(Decision d) {
  switch (d) {
    case Decision::yes: return "quasi-independent";
    case Decision::no: return "not-quasi-independent";
    case Decision::undecided: return "undecided";
  }
  return "?";
}

inline nlohmann::json relation_to_json(const Relation& r) {
  auto j = nlohmann::json::array();
  for (const auto& [x, c] : r.terms) j.push_back({x, c.str()});
  return j;
}

inline Relation relation_from_json(const GroupSpec& g, const nlohmann::json& j) {
  std::vector<std::pair<Element, Rational>> t;
  for (const auto& term : j) {
    const auto x = term.at(0).get<Element>();
    if (!g.contains(x)) throw InvalidInput("certificate: witness element out of range");
    t.emplace_back(x, Rational::parse(term.at(1).get<std::string>()));
  }
  return Relation(g, std::move(t));
}

inline nlohmann::json make_certificate(const Subset& e, const IndependenceVerdict& v) {
  nlohmann::json j;
  j["schema"] = kCertificateSchema;
  j["toolkit_version"] = kVersion;
  j["group"] = e.group().name();
  j["subset"] = e.elements();
  j["verdict"] = verdict_name(v.quasi_independent);
  j["independent"] = v.independent;
  j["method"] = to_string(v.method);
  j["nodes"] = v.nodes;
  j["max_subspace_dim"] = v.max_subspace_dim;
  if (v.quasi_witness) j["quasi_witness"] = relation_to_json(*v.quasi_witness);
  if (v.relation_witness) j["relation_witness"] = relation_to_json(*v.relation_witness);
  return j;
}

struct CertificateCheck {
  bool ok = false;
  std::string message;
};

/// Independent relation test: no structured basis involved.
inline bool independent_relation_check(const Relation& r) {
  return r.group.is_cyclic() ? cyclotomic_is_relation(r.group, r.terms) : lattice_is_relation(r.group, r.terms);
}

inline CertificateCheck verify_certificate(const nlohmann::json& j, const Budget& budget = {}) {
  auto fail = [](std::string m) { return CertificateCheck{false, std::move(m)}; };
  if (j.value("schema", "") != kCertificateSchema) return fail("unknown certificate schema");
  const GroupSpec g = GroupSpec::parse(j.at("group").get<std::string>());
  const auto elems = j.at("subset").get<std::vector<Element>>();
  for (auto x : elems) {
    if (!g.contains(x)) return fail("subset element " + std::to_string(x) + " out of range");
  }
  const Subset e(g, elems);
  const std::string verdict = j.at("verdict").get<std::string>();
  auto check_relation = [&](const char* key, bool quasi) -> std::optional<std::string> {
    if (!j.contains(key)) return std::string("missing ") + key;
    const Relation r = relation_from_json(g, j[key]);
    if (r.is_zero()) return std::string(key) + " is zero";
    for (auto x : r.support()) {
      if (!e.contains(x)) return std::string(key) + " leaves the subset";
    }
    if (quasi && !r.is_quasi()) return std::string(key) + " has a coefficient outside {0,+-1}";
    if (!independent_relation_check(r)) return std::string(key) + " is not a relation";
    return std::nullopt;
  };
  if (!j.at("independent").get<bool>()) {
    if (auto err = check_relation("relation_witness", false)) return fail(*err);
  }
  if (verdict == verdict_name(Decision::no)) {
    if (auto err = check_relation("quasi_witness", true)) return fail(*err);
    return {true, "quasi-relation re-verified"};
  }
  if (verdict == verdict_name(Decision::undecided)) return {true, "undecided verdict; nothing to certify"};
  if (verdict != verdict_name(Decision::yes)) return fail("unknown verdict '" + verdict + "'");
  const auto a = structural_test(e, budget);
  const auto b = coset_reduction_test(e, budget);
  if (a.quasi_independent != Decision::yes || b.quasi_independent != Decision::yes) {
    return fail("re-derivation does not confirm quasi-independence");
  }
  if (j.at("independent").get<bool>() && !is_independent(e).independent) return fail("set is not independent");
  if (e.size() <= 16 && !oracle_is_quasi_independent(e).quasi_independent) return fail("oracle disagrees");
  return {true, e.size() <= 16 ? "re-derived by both deciders and the oracle" : "re-derived by both deciders"};
}

}  // namespace qindep
