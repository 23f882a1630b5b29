#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rpcf::selfcheck {

enum class Status { Pass, Fail, NotReproducible };

struct CriterionResult {
  std::string name;
  Status status = Status::Fail;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  std::filesystem::path scratch;  // empty: a fresh directory under the system temp dir
  std::filesystem::path otb_dir;  // optional user-supplied OTB-layout dataset
  int workers = 0;
  std::uint64_t seed = 20190601;
};

CriterionResult check_oracle_equivalence(const Options& options);
CriterionResult check_constraint_satisfaction(const Options& options);
CriterionResult check_pooled_response(const Options& options);
CriterionResult check_parseval(const Options& options);
CriterionResult check_operator_oracles(const Options& options);
CriterionResult check_penalty_arithmetic(const Options& options);
CriterionResult check_synthetic_tracking(const Options& options);
CriterionResult check_otb_scale(const Options& options);
CriterionResult check_determinism(const Options& options);

/// Every criterion above, in that order.
std::vector<CriterionResult> run_all(const Options& options);

/// "PASS  name  (1.23 s)  detail"
std::string format_line(const CriterionResult& result);

/// True unless a reproducible criterion failed.
bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace rpcf::selfcheck
