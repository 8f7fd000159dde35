#include "pilot/matrix_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "pilot/error.hpp"

namespace pilot {

using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, long line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("matrix line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
}

std::uint64_t parse_u64(const std::string& s, long line_no) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size() || s.front() == '-') throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("matrix line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
}

constexpr const char* kCsvHeader = "replicate,label,p_r,p_a,p_g,converged";

}  // namespace

void write_matrix(std::ostream& out, const PosteriorProbMatrix& m) {
  const json header = {{"format", "pilot-matrix/1"},
                       {"fingerprint", m.fingerprint},
                       {"model", m.model},
                       {"decisions", m.space == DecisionSpace::binary ? "binary" : "ternary"},
                       {"seed", m.seed},
                       {"sample_size", m.sample_size},
                       {"n_rows", m.rows.size()}};
  out << header.dump() << '\n' << kCsvHeader << '\n';
  for (const MatrixRow& r : m.rows) {
    out << r.replicate << ',' << to_char(r.truth) << ',' << format_double(r.probs.pR()) << ','
        << format_double(r.probs.pA()) << ',' << format_double(r.probs.pG()) << ','
        << (r.converged ? 1 : 0) << '\n';
  }
}

PosteriorProbMatrix read_matrix(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("matrix: empty input");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::parse_error&) {
    throw ValidationError("matrix: first line is not a JSON header");
  }
  PosteriorProbMatrix m;
  std::size_t n_rows = 0;
  try {
    if (header.at("format") != "pilot-matrix/1") throw ValidationError("matrix: unknown format");
    m.fingerprint = header.at("fingerprint").get<std::string>();
    m.model = header.at("model").get<std::string>();
    const std::string dec = header.at("decisions").get<std::string>();
    if (dec == "binary") {
      m.space = DecisionSpace::binary;
    } else if (dec == "ternary") {
      m.space = DecisionSpace::ternary;
    } else {
      throw ValidationError("matrix: unknown decision space '" + dec + "'");
    }
    m.seed = header.at("seed").get<std::uint64_t>();
    m.sample_size = header.at("sample_size").get<int>();
    n_rows = header.at("n_rows").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("matrix header: ") + e.what());
  }
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ValidationError("matrix: missing CSV header");
  }
  m.rows.reserve(n_rows);
  long line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 6) {
      throw ValidationError("matrix line " + std::to_string(line_no) + ": expected 6 fields");
    }
    MatrixRow r;
    r.replicate = parse_u64(f[0], line_no);
    if (f[1].size() != 1) throw ValidationError("matrix line " + std::to_string(line_no) + ": bad label");
    r.truth = label_from_char(f[1][0]);
    const double pr = parse_double(f[2], line_no);
    const double pa = parse_double(f[3], line_no);
    const double pg = parse_double(f[4], line_no);
    r.probs = HypothesisProbs(pr, pa, pg);
    if (f[5] != "0" && f[5] != "1") {
      throw ValidationError("matrix line " + std::to_string(line_no) + ": converged must be 0/1");
    }
    r.converged = f[5] == "1";
    m.rows.push_back(r);
  }
  if (m.rows.size() != n_rows) {
    throw ValidationError("matrix: header says " + std::to_string(n_rows) + " rows, found " +
                          std::to_string(m.rows.size()));
  }
  m.validate();
  return m;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename onto '" + path + "': " + ec.message());
  }
}

void save_matrix(const std::string& path, const PosteriorProbMatrix& m) {
  std::ostringstream ss;
  write_matrix(ss, m);
  write_file_atomic(path, ss.str());
}

PosteriorProbMatrix load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open matrix file '" + path + "'");
  return read_matrix(in);
}

void write_report_csv(std::ostream& out, std::span<const ParetoPoint> points) {
  out << "c1,c2,c3,oc1,oc2,oc3,expected_loss,se1,se2,se3,n_replicates,n_nonconverged\n";
  for (const ParetoPoint& p : points) {
    const OCReport& r = p.report;
    out << format_double(p.c.c1()) << ',' << format_double(p.c.c2()) << ','
        << format_double(p.c.c3()) << ',' << format_double(r.oc1) << ',' << format_double(r.oc2)
        << ',' << format_double(r.oc3) << ',' << format_double(r.expected_loss) << ','
        << format_double(r.se1) << ',' << format_double(r.se2) << ',' << format_double(r.se3)
        << ',' << r.n_replicates << ',' << r.n_nonconverged << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const LossParams& c, std::span<const SweepRow> rows) {
  out << "size,c1,c2,c3,oc1,oc2,oc3,expected_loss,se1,se2,se3,n_replicates,n_nonconverged\n";
  for (const SweepRow& row : rows) {
    const OCReport& r = row.report;
    out << row.size << ',' << format_double(c.c1()) << ',' << format_double(c.c2()) << ','
        << format_double(c.c3()) << ',' << format_double(r.oc1) << ',' << format_double(r.oc2)
        << ',' << format_double(r.oc3) << ',' << format_double(r.expected_loss) << ','
        << format_double(r.se1) << ',' << format_double(r.se2) << ',' << format_double(r.se3)
        << ',' << r.n_replicates << ',' << r.n_nonconverged << '\n';
  }
}

}  // namespace pilot
