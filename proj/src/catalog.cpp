#include "nlsym/catalog.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace nlsym {

using nlohmann::json;

bool SolutionRecord::has_tag(const std::string& tag) const {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

SampleDomain SolutionRecord::sample_domain(std::size_t count, std::uint64_t seed) const {
  SampleDomain d;
  d.box = domain;
  d.count = count;
  d.seed = seed;
  d.constants = constants;
  d.complex = complex;
  for (const auto& s : singular) d.exclude.push_back(s.constraint);
  return d;
}

SymbolTable SolutionRecord::symbols() const {
  std::vector<std::string> consts;
  for (const auto& [k, v] : constants) consts.push_back(k);
  return SymbolTable::with(pde(equation).vars, consts);
}

namespace {

const json& field(const json& j, const char* key, const std::string& who) {
  auto it = j.find(key);
  if (it == j.end()) throw CatalogError(who, std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const json& j, const char* key, const std::string& who) {
  const json& v = field(j, key, who);
  if (!v.is_string()) throw CatalogError(who, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

Complex constant_value(const json& v, const std::string& who, const std::string& name) {
  if (v.is_number()) return v.get<double>();
  // [re, im]
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw CatalogError(who, "constant '" + name + "' must be a number or [re, im]");
}

SolutionRecord record_from_json(const json& j, std::size_t index) {
  std::string who = "record " + std::to_string(index);
  if (!j.is_object()) throw CatalogError(who, "record must be an object");
  SolutionRecord r;
  r.id = string_field(j, "id", who);
  if (r.id.empty()) throw CatalogError(who, "empty id");
  who = r.id;
  try {
    r.equation = equation_from_name(string_field(j, "equation", who));
  } catch (const std::invalid_argument& e) {
    throw CatalogError(who, e.what());
  }
  r.expression = string_field(j, "expression", who);
  r.provenance = string_field(j, "provenance", who);
  if (j.contains("note")) r.note = string_field(j, "note", who);
  r.suspect = j.value("suspect", false);
  r.complex = j.value("complex", false);

  if (j.contains("constants")) {
    const json& c = j["constants"];
    if (!c.is_object()) throw CatalogError(who, "'constants' must be an object");
    for (auto it = c.begin(); it != c.end(); ++it) r.constants[it.key()] = constant_value(it.value(), who, it.key());
  }
  if (j.contains("tags")) {
    const json& t = j["tags"];
    if (!t.is_array()) throw CatalogError(who, "'tags' must be an array");
    for (const auto& s : t) {
      if (!s.is_string()) throw CatalogError(who, "tags must be strings");
      r.tags.push_back(s.get<std::string>());
    }
  }

  std::vector<std::string> vars = pde(r.equation).vars;
  const json& dom = field(j, "domain", who);
  if (!dom.is_object()) throw CatalogError(who, "'domain' must be an object");
  for (const auto& v : vars) {
    auto it = dom.find(v);
    if (it == dom.end()) throw CatalogError(who, "domain misses variable " + v);
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number())
      throw CatalogError(who, "domain of " + v + " must be [lo, hi]");
    Interval iv{v, (*it)[0].get<double>(), (*it)[1].get<double>()};
    if (!(iv.lo < iv.hi)) throw CatalogError(who, "empty interval for " + v);
    r.domain.push_back(iv);
  }
  if (dom.size() != vars.size()) throw CatalogError(who, "domain has variables outside the equation");

  SymbolTable syms = r.symbols();
  auto parse = [&](const std::string& s) {
    try {
      return parse_expr(s, syms);
    } catch (const ParseError& e) {
      throw CatalogError(who, "cannot parse '" + s + "': " + e.what());
    }
  };
  r.expr = parse(r.expression);
  if (j.contains("singular")) {
    const json& s = j["singular"];
    if (!s.is_array()) throw CatalogError(who, "'singular' must be an array");
    for (const auto& locus : s) {
      SingularLocus l;
      std::string kind = "nonzero";
      if (locus.is_string()) {
        l.text = locus.get<std::string>();
      } else if (locus.is_object()) {
        l.text = string_field(locus, "expr", who);
        kind = locus.value("kind", "nonzero");
        l.constraint.margin = locus.value("margin", l.constraint.margin);
      } else {
        throw CatalogError(who, "singular locus must be a string or an object");
      }
      if (kind == "nonzero")
        l.constraint.kind = ConstraintKind::NonZero;
      else if (kind == "positive")
        l.constraint.kind = ConstraintKind::Positive;
      else
        throw CatalogError(who, "singular kind must be nonzero or positive, got " + kind);
      l.constraint.expr = parse(l.text);
      r.singular.push_back(std::move(l));
    }
  }
  return r;
}

}  // namespace

Catalog::Catalog(std::vector<SolutionRecord> records) : records_(std::move(records)) {
  std::vector<std::string> ids;
  for (const auto& r : records_) ids.push_back(r.id);
  std::sort(ids.begin(), ids.end());
  auto dup = std::adjacent_find(ids.begin(), ids.end());
  if (dup != ids.end()) throw CatalogError(*dup, "duplicate id");
}

Catalog Catalog::parse(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw CatalogError("", std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_array()) throw CatalogError("", "catalog must be a JSON array of records");
  std::vector<SolutionRecord> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(record_from_json(j[i], i));
  return Catalog(std::move(out));
}

Catalog Catalog::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CatalogError("", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string default_catalog_path() {
  if (const char* p = std::getenv("NLSYM_CATALOG")) return p;
  return std::string(NLSYM_DATA_DIR) + "/catalog.json";
}

Catalog Catalog::builtin() { return load(default_catalog_path()); }

const SolutionRecord* Catalog::find(const std::string& id) const {
  for (const auto& r : records_)
    if (r.id == id) return &r;
  return nullptr;
}

const SolutionRecord& Catalog::get(const std::string& id) const {
  if (const SolutionRecord* r = find(id)) return *r;
  throw CatalogError(id, "no such record");
}

std::vector<const SolutionRecord*> Catalog::with_tag(const std::string& tag) const {
  std::vector<const SolutionRecord*> out;
  for (const auto& r : records_)
    if (r.has_tag(tag)) out.push_back(&r);
  return out;
}

std::vector<const SolutionRecord*> Catalog::for_equation(Equation eq) const {
  std::vector<const SolutionRecord*> out;
  for (const auto& r : records_)
    if (r.equation == eq) out.push_back(&r);
  return out;
}

RecordResult verify_record(const SolutionRecord& r, double tol, std::size_t samples, std::uint64_t seed) {
  RecordResult out;
  out.id = r.id;
  out.suspect = r.suspect;
  try {
    out.report = check_solution(pde(r.equation), r.expr, r.sample_domain(samples, seed), tol, CheckOptions{false});
    out.pass = out.report.pass;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

CatalogReport Catalog::verify_all(double tol, std::size_t samples, std::uint64_t seed) const {
  CatalogReport rep;
  rep.records.resize(records_.size());
  parallel_for(records_.size(), [&](std::size_t i) { rep.records[i] = verify_record(records_[i], tol, samples, seed); });
  for (const auto& r : rep.records) {
    ++rep.checked;
    if (r.pass) continue;
    if (r.suspect) {
      ++rep.suspect_failed;
    } else {
      ++rep.failed;
      rep.pass = false;
    }
  }
  return rep;
}

std::string catalog_report_json(const CatalogReport& r, int indent) {
  json j;
  j["pass"] = r.pass;
  j["checked"] = r.checked;
  j["failed"] = r.failed;
  j["suspect_failed"] = r.suspect_failed;
  j["records"] = json::array();
  for (const auto& rec : r.records) {
    json e;
    e["id"] = rec.id;
    e["pass"] = rec.pass;
    e["suspect"] = rec.suspect;
    if (rec.error.empty())
      e["report"] = json::parse(report_json(rec.report));
    else
      e["error"] = rec.error;
    j["records"].push_back(e);
  }
  return j.dump(indent);
}

}  // namespace nlsym
