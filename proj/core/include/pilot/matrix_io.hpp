#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "pilot/oc_engine.hpp"

namespace pilot {

// Matrix file layout: one JSON header line, then CSV
//   replicate,label,p_r,p_a,p_g,converged
// with probabilities printed as %.17g so a read/write cycle is lossless.
void write_matrix(std::ostream& out, const PosteriorProbMatrix& m);
PosteriorProbMatrix read_matrix(std::istream& in);

void save_matrix(const std::string& path, const PosteriorProbMatrix& m);
PosteriorProbMatrix load_matrix(const std::string& path);

// Report CSV: c1,c2,c3,oc1,oc2,oc3,expected_loss,se1,se2,se3,n_replicates,n_nonconverged
void write_report_csv(std::ostream& out, std::span<const ParetoPoint> points);
void write_sweep_csv(std::ostream& out, const LossParams& c, std::span<const SweepRow> rows);

// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

std::string format_double(double x);

}  // namespace pilot
