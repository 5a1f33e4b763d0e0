// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#ifndef QMIMO_MATRIX_IO_HPP
#define QMIMO_MATRIX_IO_HPP

#include <Eigen/Dense>
#include <string>

namespace qmimo {

// Complex matrix interchange format, for cross-implementation comparison.
//
// CSV: one matrix row per line, entries as re,im pairs left to right, so a
// line holds 2*cols comma-separated numbers printed with 17 significant
// digits.
//
// Binary: magic "QMX1", then rows and cols as little-endian uint64, then
// row-major entries as little-endian float64 pairs (re, im).
//
// save_matrix / load_matrix dispatch on the ".csv" extension, anything else
// is treated as binary. I/O failures throw config_error naming the path.
void save_matrix_csv(const std::string& path, const Eigen::MatrixXcd& m);
Eigen::MatrixXcd load_matrix_csv(const std::string& path);
void save_matrix_bin(const std::string& path, const Eigen::MatrixXcd& m);
Eigen::MatrixXcd load_matrix_bin(const std::string& path);
void save_matrix(const std::string& path, const Eigen::MatrixXcd& m);
Eigen::MatrixXcd load_matrix(const std::string& path);

// One real value per line or comma-separated; used for gain spectra.
Eigen::VectorXd load_vector_csv(const std::string& path);
void save_vector_csv(const std::string& path, const Eigen::VectorXd& v);

} // namespace qmimo

#endif
