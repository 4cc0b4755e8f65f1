#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace otr {

inline constexpr const char* kInterceptName = "(intercept)";

/// Observed sample {(xᵢ, Aᵢ, Yᵢ)}: an n×p covariate matrix, a 0/1 treatment
/// vector and a real outcome vector, plus the anchor column whose coefficient
/// is normalized to absolute value one.
///
/// Immutable after construction; the constructor enforces shape, finiteness,
/// binary treatment and a non-intercept anchor. Estimation-specific checks
/// (both arms present, varying anchor) live in validate_for_estimation().
class Dataset {
 public:
  Dataset(Eigen::MatrixXd covariates, Eigen::VectorXd treatment, Eigen::VectorXd outcome,
          std::vector<std::string> column_names, Eigen::Index anchor_index, bool has_intercept);

  const Eigen::MatrixXd& covariates() const noexcept { return covariates_; }
  const Eigen::VectorXd& treatment() const noexcept { return treatment_; }
  const Eigen::VectorXd& outcome() const noexcept { return outcome_; }
  const std::vector<std::string>& column_names() const noexcept { return column_names_; }
  Eigen::Index anchor_index() const noexcept { return anchor_index_; }
  bool has_intercept() const noexcept { return has_intercept_; }

  Eigen::Index size() const noexcept { return covariates_.rows(); }
  Eigen::Index dimension() const noexcept { return covariates_.cols(); }
  Eigen::Index treated_count() const;

  // Index of a named column; throws ValidationError if absent.
  Eigen::Index column_index(const std::string& name) const;

 private:
  Eigen::MatrixXd covariates_;
  Eigen::VectorXd treatment_;
  Eigen::VectorXd outcome_;
  std::vector<std::string> column_names_;
  Eigen::Index anchor_index_;
  bool has_intercept_;
};

struct CsvColumns {
  std::string outcome;
  std::string treatment;
  std::vector<std::string> covariates;
  bool add_intercept = true;
  std::string anchor;
};

// Reads a comma-separated file with a header row. Columns of the result are
// (intercept if requested, then covariates in the order given).
Dataset load_csv(const std::filesystem::path& path, const CsvColumns& columns);
Dataset parse_csv(std::istream& in, const CsvColumns& columns, const std::string& source = "<stream>");

// Writes outcome, treatment and the non-intercept covariates with 17
// significant digits; load_csv of the output reproduces the dataset.
void write_csv(const Dataset& data, std::ostream& out, const std::string& outcome_name = "y",
               const std::string& treatment_name = "a");

// Both arms nonempty and the anchor column non-constant.
void validate_for_estimation(const Dataset& data);

}  // namespace otr
