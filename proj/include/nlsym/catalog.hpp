#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlsym/expr.hpp"
#include "nlsym/residual.hpp"
#include "nlsym/sample.hpp"

namespace nlsym {

struct SingularLocus {
  std::string text;
  Constraint constraint;
};

struct SolutionRecord {
  std::string id;
  Equation equation = Equation::Burgers;
  std::string expression;
  Expr expr;
  Bindings constants;  // default test values of the free constants
  std::vector<Interval> domain;
  std::vector<SingularLocus> singular;
  std::string provenance;
  std::vector<std::string> tags;
  std::string note;
  bool suspect = false;  // verified and reported, never a hard failure
  bool complex = false;  // complex-valued for real arguments

  bool has_tag(const std::string& tag) const;
  // Box, singular loci as exclusions, default constants.
  SampleDomain sample_domain(std::size_t count = 100, std::uint64_t seed = 1) const;
  SymbolTable symbols() const;
};

// Schema, parse and lookup failures. `record` is the id or array index.
class CatalogError : public std::runtime_error {
 public:
  CatalogError(const std::string& record, const std::string& what)
      : std::runtime_error(record.empty() ? what : record + ": " + what), record_(record) {}
  const std::string& record() const { return record_; }

 private:
  std::string record_;
};

struct RecordResult {
  std::string id;
  bool suspect = false;
  bool pass = false;
  Report report;
  std::string error;  // evaluation failure instead of a report
};

struct CatalogReport {
  bool pass = true;  // every non-suspect record passed
  std::size_t checked = 0;
  std::size_t failed = 0;
  std::size_t suspect_failed = 0;
  std::vector<RecordResult> records;
};

std::string catalog_report_json(const CatalogReport& r, int indent = -1);

class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<SolutionRecord> records);

  static Catalog load(const std::string& path);
  static Catalog parse(const std::string& json_text);
  // The shipped corpus.
  static Catalog builtin();

  const std::vector<SolutionRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  // Throws CatalogError for an unknown id.
  const SolutionRecord& get(const std::string& id) const;
  const SolutionRecord* find(const std::string& id) const;
  std::vector<const SolutionRecord*> with_tag(const std::string& tag) const;
  std::vector<const SolutionRecord*> for_equation(Equation eq) const;

  // Sampled check_solution per record on its domain, records in parallel.
  CatalogReport verify_all(double tol = 1e-8, std::size_t samples = 100, std::uint64_t seed = 1) const;

 private:
  std::vector<SolutionRecord> records_;
};

RecordResult verify_record(const SolutionRecord& r, double tol = 1e-8, std::size_t samples = 100,
                           std::uint64_t seed = 1);

std::string default_catalog_path();

}  // namespace nlsym
