#include "ergoperturb/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ergo {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

}  // namespace

void write_density_csv(const std::string& path, const SignedDensity& p,
                       const std::vector<std::string>& comments) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto& c : comments) f << "# " << c << "\n";
  f << "x,w,value\n";
  for (int i = 0; i < p.grid.size(); ++i)
    f << format_double(p.grid.nodes(i)) << ',' << format_double(p.grid.weights(i))
      << ',' << format_double(p.values(i)) << "\n";
}

SignedDensity read_density_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::vector<double> xs, ws, vals;
  bool header_seen = false;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column names
      continue;
    }
    const auto row = parse_row(line);
    if (row.size() != 3) throw std::runtime_error(path + ": expected 3 columns");
    xs.push_back(row[0]);
    ws.push_back(row[1]);
    vals.push_back(row[2]);
  }
  if (xs.size() < 2) throw std::runtime_error(path + ": too few rows");
  SignedDensity p;
  const int n = static_cast<int>(xs.size());
  p.grid.nodes = Eigen::Map<Eigen::VectorXd>(xs.data(), n);
  p.grid.weights = Eigen::Map<Eigen::VectorXd>(ws.data(), n);
  p.grid.x_max = std::abs(xs.back());
  p.values = Eigen::Map<Eigen::VectorXd>(vals.data(), n);
  return p;
}

void write_kernel_csv(const std::string& path, const DiscretizedKernel& k,
                      double r) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << "# n=" << k.grid().size() << " x_max=" << format_double(k.grid().x_max)
    << " r=" << format_double(r) << "\n";
  const Eigen::MatrixXd values = k.kernel_matrix();
  for (int i = 0; i < values.rows(); ++i) {
    for (int j = 0; j < values.cols(); ++j) {
      if (j) f << ',';
      f << format_double(values(i, j));
    }
    f << "\n";
  }
}

DiscretizedKernel read_kernel_csv(const std::string& path, double* r) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("# n=", 0) != 0)
    throw std::runtime_error(path + ": missing kernel header");
  int n = 0;
  double x_max = 0.0, rr = 0.0;
  if (std::sscanf(line.c_str(), "# n=%d x_max=%lf r=%lf", &n, &x_max, &rr) != 3)
    throw std::runtime_error(path + ": malformed kernel header");
  if (r) *r = rr;
  Grid grid = Grid::uniform(n, x_max);
  Eigen::MatrixXd values(n, n);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(f, line))
      throw std::runtime_error(path + ": truncated kernel matrix");
    const auto row = parse_row(line);
    if (static_cast<int>(row.size()) != n)
      throw std::runtime_error(path + ": row " + std::to_string(i) +
                               " has wrong width");
    for (int j = 0; j < n; ++j) values(i, j) = row[j];
  }
  return DiscretizedKernel::from_kernel_values(std::move(grid), values);
}

void write_table_csv(const std::string& path,
                     const std::vector<std::string>& comments,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto& c : comments) f << "# " << c << "\n";
  for (size_t j = 0; j < columns.size(); ++j) {
    if (j) f << ',';
    f << columns[j];
  }
  f << "\n";
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw std::invalid_argument("write_table_csv: ragged row");
    for (size_t j = 0; j < row.size(); ++j) {
      if (j) f << ',';
      f << format_double(row[j]);
    }
    f << "\n";
  }
}

}  // namespace ergo
