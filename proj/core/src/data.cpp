#include "otr/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "otr/error.hpp"

namespace otr {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column,
                  const std::string& source) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ValidationError("data: " + source + ": row " + std::to_string(row) + ", column '" + column +
                          "': cannot parse '" + cell + "' as a finite number");
  }
  return value;
}

}  // namespace

Dataset::Dataset(Eigen::MatrixXd covariates, Eigen::VectorXd treatment, Eigen::VectorXd outcome,
                 std::vector<std::string> column_names, Eigen::Index anchor_index, bool has_intercept)
    : covariates_(std::move(covariates)),
      treatment_(std::move(treatment)),
      outcome_(std::move(outcome)),
      column_names_(std::move(column_names)),
      anchor_index_(anchor_index),
      has_intercept_(has_intercept) {
  const auto n = covariates_.rows();
  if (n < 2) throw ValidationError("data: at least 2 observations required, got " + std::to_string(n));
  if (treatment_.size() != n || outcome_.size() != n) {
    throw ValidationError("data: covariates have " + std::to_string(n) + " rows but treatment has " +
                          std::to_string(treatment_.size()) + " and outcome " +
                          std::to_string(outcome_.size()));
  }
  if (covariates_.cols() < 1) throw ValidationError("data: at least one covariate column required");
  if (column_names_.empty()) {
    for (Eigen::Index j = 0; j < covariates_.cols(); ++j) {
      column_names_.push_back(has_intercept_ && j == 0 ? kInterceptName : "x" + std::to_string(j));
    }
  }
  if (static_cast<Eigen::Index>(column_names_.size()) != covariates_.cols()) {
    throw ValidationError("data: " + std::to_string(column_names_.size()) + " column names for " +
                          std::to_string(covariates_.cols()) + " covariate columns");
  }
  if (!covariates_.allFinite()) throw ValidationError("data: covariates contain non-finite entries");
  if (!outcome_.allFinite()) throw ValidationError("data: outcome contains non-finite entries");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (treatment_[i] != 0.0 && treatment_[i] != 1.0) {
      throw ValidationError("data: treatment of observation " + std::to_string(i + 1) +
                            " is not 0 or 1");
    }
  }
  if (anchor_index_ < 0 || anchor_index_ >= covariates_.cols()) {
    throw ValidationError("data: anchor index " + std::to_string(anchor_index_) + " out of range");
  }
  if (has_intercept_ && anchor_index_ == 0) {
    throw ValidationError("data: the anchor cannot be the intercept column");
  }
}

Eigen::Index Dataset::treated_count() const {
  return static_cast<Eigen::Index>(treatment_.sum());
}

Eigen::Index Dataset::column_index(const std::string& name) const {
  const auto it = std::find(column_names_.begin(), column_names_.end(), name);
  if (it == column_names_.end()) throw ValidationError("data: no covariate column named '" + name + "'");
  return static_cast<Eigen::Index>(it - column_names_.begin());
}

Dataset parse_csv(std::istream& in, const CsvColumns& columns, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("data: " + source + ": missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_row(line);
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t j = 0; j < header.size(); ++j) position.emplace(header[j], j);

  auto locate = [&](const std::string& name, const char* role) {
    const auto it = position.find(name);
    if (it == position.end()) {
      throw ValidationError("data: " + source + ": " + role + " column '" + name + "' not found");
    }
    return it->second;
  };
  if (columns.covariates.empty()) throw ValidationError("data: no covariate columns requested");
  const auto outcome_pos = locate(columns.outcome, "outcome");
  const auto treatment_pos = locate(columns.treatment, "treatment");
  std::vector<std::size_t> covariate_pos;
  for (const auto& name : columns.covariates) covariate_pos.push_back(locate(name, "covariate"));

  const auto anchor_it = std::find(columns.covariates.begin(), columns.covariates.end(), columns.anchor);
  if (anchor_it == columns.covariates.end()) {
    throw ValidationError("data: anchor column '" + columns.anchor + "' is not among the covariates");
  }

  std::vector<double> y, a, x;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw ValidationError("data: " + source + ": row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(header.size()));
    }
    y.push_back(parse_cell(cells[outcome_pos], row, columns.outcome, source));
    const double treat = parse_cell(cells[treatment_pos], row, columns.treatment, source);
    if (treat != 0.0 && treat != 1.0) {
      throw ValidationError("data: " + source + ": row " + std::to_string(row) + ", column '" +
                            columns.treatment + "': treatment must be 0 or 1, got '" +
                            cells[treatment_pos] + "'");
    }
    a.push_back(treat);
    for (std::size_t k = 0; k < covariate_pos.size(); ++k) {
      x.push_back(parse_cell(cells[covariate_pos[k]], row, columns.covariates[k], source));
    }
  }
  if (row < 2) {
    throw ValidationError("data: " + source + ": at least 2 data rows required, got " + std::to_string(row));
  }

  const auto n = static_cast<Eigen::Index>(row);
  const auto offset = columns.add_intercept ? 1 : 0;
  const auto q = static_cast<Eigen::Index>(covariate_pos.size());
  Eigen::MatrixXd covariates(n, q + offset);
  if (columns.add_intercept) covariates.col(0).setOnes();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < q; ++k) covariates(i, k + offset) = x[static_cast<std::size_t>(i * q + k)];
  }
  std::vector<std::string> names;
  if (columns.add_intercept) names.emplace_back(kInterceptName);
  names.insert(names.end(), columns.covariates.begin(), columns.covariates.end());
  const auto anchor = static_cast<Eigen::Index>(anchor_it - columns.covariates.begin()) + offset;

  return Dataset(std::move(covariates), Eigen::Map<Eigen::VectorXd>(a.data(), n),
                 Eigen::Map<Eigen::VectorXd>(y.data(), n), std::move(names), anchor,
                 columns.add_intercept);
}

Dataset load_csv(const std::filesystem::path& path, const CsvColumns& columns) {
  std::ifstream in(path);
  if (!in) throw ValidationError("data: cannot open '" + path.string() + "'");
  return parse_csv(in, columns, path.string());
}

void write_csv(const Dataset& data, std::ostream& out, const std::string& outcome_name,
               const std::string& treatment_name) {
  const auto first = data.has_intercept() ? 1 : 0;
  std::ostringstream buffer;
  buffer << std::setprecision(std::numeric_limits<double>::max_digits10);
  buffer << outcome_name << ',' << treatment_name;
  for (Eigen::Index j = first; j < data.dimension(); ++j) buffer << ',' << data.column_names()[j];
  buffer << '\n';
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    buffer << data.outcome()[i] << ',' << static_cast<int>(data.treatment()[i]);
    for (Eigen::Index j = first; j < data.dimension(); ++j) buffer << ',' << data.covariates()(i, j);
    buffer << '\n';
  }
  out << buffer.str();
}

void validate_for_estimation(const Dataset& data) {
  const auto treated = data.treated_count();
  if (treated == 0 || treated == data.size()) {
    throw ValidationError("data: single treatment arm (" + std::to_string(treated) + " of " +
                          std::to_string(data.size()) + " treated); both arms are required");
  }
  const auto anchor = data.covariates().col(data.anchor_index());
  if (anchor.minCoeff() == anchor.maxCoeff()) {
    throw ValidationError("data: degenerate anchor column '" + data.column_names()[data.anchor_index()] +
                          "' is constant");
  }
}

}  // namespace otr
