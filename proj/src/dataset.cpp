#include "merlin/dataset.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace merlin {

static_assert(std::endian::native == std::endian::little,
              "F.bin is defined as little-endian float64");

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_finite(const Eigen::Ref<const Eigen::MatrixXd>& x, const std::string& name) {
  if (!x.allFinite()) throw std::invalid_argument(name + " contains non-finite values");
}

void normalize_direction(Eigen::VectorXd& v, const std::string& name) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw std::invalid_argument("degenerate extractor: " + name + " has zero norm");
  v /= norm;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_csv(const fs::path& path, const Eigen::MatrixXd& mat) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  for (Eigen::Index r = 0; r < mat.rows(); ++r) {
    for (Eigen::Index c = 0; c < mat.cols(); ++c) {
      if (c) out << ',';
      out << format_double(mat(r, c));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Eigen::MatrixXd read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing file: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      size_t pos = 0;
      double value = 0.0;
      try {
        value = std::stod(field, &pos);
      } catch (const std::exception&) {
        throw std::runtime_error("bad numeric field in " + path.string() + ": '" + field + "'");
      }
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("ragged rows in " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty file: " + path.string());
  Eigen::MatrixXd mat(rows.size(), rows.front().size());
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c) mat(r, c) = rows[r][c];
  return mat;
}

Eigen::VectorXd read_csv_vector(const fs::path& path, Eigen::Index expected,
                                const std::string& name) {
  Eigen::MatrixXd mat = read_csv(path);
  Eigen::VectorXd v;
  if (mat.cols() == 1)
    v = mat.col(0);
  else if (mat.rows() == 1)
    v = mat.row(0).transpose();
  else
    throw std::runtime_error(name + " is not a vector: " + path.string());
  if (v.size() != expected)
    throw std::runtime_error(name + " dimension mismatch: expected " + std::to_string(expected) +
                             ", got " + std::to_string(v.size()));
  return v;
}

json read_meta(const fs::path& dir) {
  std::ifstream in(dir / "meta.json");
  if (!in) throw std::runtime_error("missing file: " + (dir / "meta.json").string());
  json meta;
  try {
    in >> meta;
  } catch (const json::exception& e) {
    throw std::runtime_error("bad meta.json: " + std::string(e.what()));
  }
  return meta;
}

}  // namespace

void BandSpec::validate_for(double fs) const {
  require(fs > 0.0, "sampling frequency must be positive");
  require(omega1 >= 0.0, "band lower edge must be >= 0");
  require(omega1 < omega2, "band requires omega1 < omega2");
  require(omega2 <= fs / 2.0, "band upper edge exceeds the Nyquist frequency");
}

void Dataset2D::validate() const {
  require(d() >= 2, "dataset requires d >= 2");
  require(m() >= 3, "dataset requires m >= 3");
  require(S.size() == m(), "S length does not match sample count");
  require(v.size() == d(), "v length does not match channel count");
  check_finite(S, "S");
  check_finite(F, "F");
  check_finite(v, "v");
  require(std::abs(v.norm() - 1.0) <= 1e-8, "v must be unit norm");
  if (wG0) {
    require(wG0->size() == d(), "wG0 length does not match channel count");
    check_finite(*wG0, "wG0");
    require(std::abs(wG0->norm() - 1.0) <= 1e-8, "wG0 must be unit norm");
  }
}

void Dataset2D::finalize() {
  require(v.size() > 0, "v is empty");
  check_finite(v, "v");
  normalize_direction(v, "v");
  if (wG0) {
    check_finite(*wG0, "wG0");
    normalize_direction(*wG0, "wG0");
  }
  validate();
}

void Dataset3D::validate() const {
  require(channels >= 2, "dataset requires d >= 2");
  require(m() >= 3, "dataset requires m >= 3");
  require(n() >= 4, "dataset requires n >= 4");
  require(fs > 0.0, "sampling frequency must be positive");
  require(Ftilde.cols() == static_cast<Eigen::Index>(channels) * m(),
          "tensor width does not equal d*m");
  require(S.size() == m(), "S length does not match trial count");
  require(v.size() == channels, "v length does not match channel count");
  check_finite(S, "S");
  check_finite(Ftilde, "Ftilde");
  check_finite(v, "v");
  require(std::abs(v.norm() - 1.0) <= 1e-8, "v must be unit norm");
  if (wG0) {
    require(wG0->size() == channels, "wG0 length does not match channel count");
    check_finite(*wG0, "wG0");
    require(std::abs(wG0->norm() - 1.0) <= 1e-8, "wG0 must be unit norm");
  }
}

void Dataset3D::finalize() {
  require(v.size() > 0, "v is empty");
  check_finite(v, "v");
  normalize_direction(v, "v");
  if (wG0) {
    check_finite(*wG0, "wG0");
    normalize_direction(*wG0, "wG0");
  }
  validate();
}

Dataset load_bundle(const fs::path& dir) {
  const json meta = read_meta(dir);
  const std::string kind = meta.value("kind", "");
  if (kind != "2d" && kind != "3d")
    throw std::runtime_error("meta.json: unknown kind '" + kind + "'");
  const int d = meta.value("d", 0);
  const int m = meta.value("m", 0);
  const bool hasW = meta.value("has_wG0", false);
  if (d <= 0 || m <= 0) throw std::runtime_error("meta.json: bad dimensions");

  if (kind == "2d") {
    Dataset2D ds;
    ds.S = read_csv_vector(dir / "S.csv", m, "S");
    ds.F = read_csv(dir / "F.csv");
    if (ds.F.rows() != d || ds.F.cols() != m)
      throw std::runtime_error("F.csv dimension mismatch with meta.json");
    ds.v = read_csv_vector(dir / "v.csv", d, "v");
    if (hasW) ds.wG0 = read_csv_vector(dir / "wG0.csv", d, "wG0");
    ds.finalize();
    return ds;
  }

  const int n = meta.value("n", 0);
  const double fs = meta.value("fs", 0.0);
  if (n <= 0) throw std::runtime_error("meta.json: bad n");
  Dataset3D ds;
  ds.channels = d;
  ds.fs = fs;
  ds.S = read_csv_vector(dir / "S.csv", m, "S");
  ds.v = read_csv_vector(dir / "v.csv", d, "v");
  if (hasW) ds.wG0 = read_csv_vector(dir / "wG0.csv", d, "wG0");

  const fs::path binPath = dir / "F.bin";
  std::ifstream bin(binPath, std::ios::binary);
  if (!bin) throw std::runtime_error("missing file: " + binPath.string());
  const std::uintmax_t expectedBytes =
      static_cast<std::uintmax_t>(d) * m * n * sizeof(double);
  if (fs::file_size(binPath) != expectedBytes)
    throw std::runtime_error("F.bin size does not match meta.json dimensions");
  ds.Ftilde.resize(n, static_cast<Eigen::Index>(d) * m);
  bin.read(reinterpret_cast<char*>(ds.Ftilde.data()), static_cast<std::streamsize>(expectedBytes));
  if (!bin) throw std::runtime_error("read failed: " + binPath.string());
  ds.finalize();
  return ds;
}

namespace {

void write_common(const fs::path& dir, const Eigen::VectorXd& S, const Eigen::VectorXd& v,
                  const std::optional<Eigen::VectorXd>& wG0) {
  write_csv(dir / "S.csv", S);
  write_csv(dir / "v.csv", v);
  if (wG0) write_csv(dir / "wG0.csv", *wG0);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
}

}  // namespace

void save_bundle(const Dataset2D& ds, const fs::path& dir) {
  ds.validate();
  ensure_dir(dir);
  json meta{{"kind", "2d"}, {"d", ds.d()}, {"m", ds.m()}, {"has_wG0", ds.wG0.has_value()}};
  std::ofstream metaOut(dir / "meta.json");
  if (!metaOut) throw std::runtime_error("cannot open for writing: " + (dir / "meta.json").string());
  metaOut << meta.dump(2) << '\n';
  write_common(dir, ds.S, ds.v, ds.wG0);
  write_csv(dir / "F.csv", ds.F);
}

void save_bundle(const Dataset3D& ds, const fs::path& dir) {
  ds.validate();
  ensure_dir(dir);
  json meta{{"kind", "3d"},       {"d", ds.d()}, {"m", ds.m()}, {"n", ds.n()},
            {"fs", ds.fs},        {"has_wG0", ds.wG0.has_value()}};
  std::ofstream metaOut(dir / "meta.json");
  if (!metaOut) throw std::runtime_error("cannot open for writing: " + (dir / "meta.json").string());
  metaOut << meta.dump(2) << '\n';
  write_common(dir, ds.S, ds.v, ds.wG0);
  std::ofstream bin(dir / "F.bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open for writing: " + (dir / "F.bin").string());
  bin.write(reinterpret_cast<const char*>(ds.Ftilde.data()),
            static_cast<std::streamsize>(sizeof(double)) * ds.Ftilde.size());
  if (!bin) throw std::runtime_error("write failed: " + (dir / "F.bin").string());
}

void save_bundle(const Dataset& ds, const fs::path& dir) {
  std::visit([&](const auto& d) { save_bundle(d, dir); }, ds);
}

}  // namespace merlin
