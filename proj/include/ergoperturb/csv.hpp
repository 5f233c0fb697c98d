#pragma once

#include "ergoperturb/grid.hpp"
#include "ergoperturb/kernel.hpp"

#include <string>
#include <vector>

namespace ergo {

/// Grid function / density file: one "x,w,value" row per node.
void write_density_csv(const std::string& path, const SignedDensity& p,
                       const std::vector<std::string>& comments = {});
SignedDensity read_density_csv(const std::string& path);

/// Kernel matrix file: a single comment header carrying (n, x_max, r)
/// followed by the n x n kernel values k(x_i, y_j).
void write_kernel_csv(const std::string& path, const DiscretizedKernel& k,
                      double r);
DiscretizedKernel read_kernel_csv(const std::string& path, double* r = nullptr);

/// Generic numeric table with leading comment lines and a column-name row.
void write_table_csv(const std::string& path,
                     const std::vector<std::string>& comments,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows);

std::string format_double(double x);

}  // namespace ergo
