#include "vccgm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace vccgm {

namespace {

constexpr char kMagic[4] = {'V', 'C', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw DataError("dataset file truncated");
  return v;
}

}  // namespace

Tensor Dataset::rows(std::span<const std::int64_t> which) const {
  Tensor out(static_cast<std::int64_t>(which.size()), d);
  for (std::size_t i = 0; i < which.size(); ++i) {
    auto r = row(which[i]);
    std::copy(r.begin(), r.end(), out.data.begin() + static_cast<std::int64_t>(i) * d);
  }
  return out;
}

std::int64_t ToyFamily::dim() const {
  switch (kind) {
    case Kind::line1: return 1;
    case Kind::circle2: return 2;
    case Kind::helix3: return 3;
  }
  return 2;
}

void ToyFamily::mean(double y, std::span<double> out) const {
  switch (kind) {
    case Kind::line1:
      out[0] = 2.0 * y - 1.0;
      break;
    case Kind::circle2:
      out[0] = std::cos(2.0 * M_PI * y);
      out[1] = std::sin(2.0 * M_PI * y);
      break;
    case Kind::helix3:
      out[0] = std::cos(2.0 * M_PI * y);
      out[1] = std::sin(2.0 * M_PI * y);
      out[2] = 2.0 * y - 1.0;
      break;
  }
}

void ToyFamily::validate() const {
  // s(y) = base_std + std_slope * y, monotone in y: positivity at the
  // endpoints covers [0, 1].
  if (!(base_std > 0.0) || !(base_std + std_slope > 0.0))
    throw InvalidSpec("toy family: covariance not positive definite on [0, 1]");
}

std::string ToyFamily::name() const {
  switch (kind) {
    case Kind::line1: return "line1";
    case Kind::circle2: return "circle2";
    case Kind::helix3: return "helix3";
  }
  return "circle2";
}

ToyFamily ToyFamily::parse(const std::string& name, double base_std, double std_slope) {
  ToyFamily f;
  if (name == "line1")
    f.kind = Kind::line1;
  else if (name == "circle2")
    f.kind = Kind::circle2;
  else if (name == "helix3")
    f.kind = Kind::helix3;
  else
    throw InvalidSpec("unknown toy family '" + name + "'");
  f.base_std = base_std;
  f.std_slope = std_slope;
  f.validate();
  return f;
}

ToyDataset make_toy_dataset(std::int64_t n_labels, std::int64_t per_label,
                            const ToyFamily& family, std::uint64_t seed) {
  if (n_labels < 2) throw InvalidSpec("make_toy_dataset: n_labels must be >= 2");
  if (per_label < 1) throw InvalidSpec("make_toy_dataset: per_label must be >= 1");
  family.validate();

  ToyDataset out;
  out.family = family;
  const std::int64_t d = family.dim();
  out.data.d = d;
  out.data.labels.reserve(static_cast<std::size_t>(n_labels * per_label));
  out.data.x.reserve(static_cast<std::size_t>(n_labels * per_label * d));

  Rng rng(seed);
  std::vector<double> mu(static_cast<std::size_t>(d));
  for (std::int64_t li = 0; li < n_labels; ++li) {
    double y = static_cast<double>(li) / static_cast<double>(n_labels - 1);
    family.mean(y, mu);
    double s = family.stddev(y);
    for (std::int64_t k = 0; k < per_label; ++k) {
      out.data.labels.push_back(y);
      for (std::int64_t j = 0; j < d; ++j)
        out.data.x.push_back(mu[static_cast<std::size_t>(j)] + s * rng.normal());
    }
  }
  return out;
}

void save_dataset_binary(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot open '" + path.string() + "' for writing");
  os.write(kMagic, 4);
  write_pod(os, kVersion);
  write_pod(os, static_cast<std::uint32_t>(ds.d));
  write_pod(os, static_cast<std::uint64_t>(ds.n()));
  for (std::int64_t i = 0; i < ds.n(); ++i) {
    write_pod(os, ds.labels[static_cast<std::size_t>(i)]);
    os.write(reinterpret_cast<const char*>(ds.x.data() + i * ds.d),
             static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(ds.d)));
  }
  if (!os) throw DataError("write failed for '" + path.string() + "'");
}

Dataset load_dataset_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open '" + path.string() + "'");
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("'" + path.string() + "' is not a binary dataset file");
  auto version = read_pod<std::uint32_t>(is);
  if (version != kVersion)
    throw DataError("unsupported dataset version " + std::to_string(version));
  auto d = read_pod<std::uint32_t>(is);
  auto n = read_pod<std::uint64_t>(is);
  if (d == 0 || n == 0) throw EmptyDataset("'" + path.string() + "' holds no samples");

  Dataset ds;
  ds.d = d;
  ds.labels.resize(n);
  ds.x.resize(n * d);
  for (std::uint64_t i = 0; i < n; ++i) {
    ds.labels[i] = read_pod<double>(is);
    is.read(reinterpret_cast<char*>(ds.x.data() + i * d),
            static_cast<std::streamsize>(sizeof(double) * d));
    if (!is) throw DataError("dataset file truncated");
  }
  return ds;
}

void save_dataset_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot open '" + path.string() + "' for writing");
  os << "label";
  for (std::int64_t j = 0; j < ds.d; ++j) os << ",x" << j;
  os << "\n";
  char buf[32];
  for (std::int64_t i = 0; i < ds.n(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", ds.labels[static_cast<std::size_t>(i)]);
    os << buf;
    for (std::int64_t j = 0; j < ds.d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.x[static_cast<std::size_t>(i * ds.d + j)]);
      os << ',' << buf;
    }
    os << "\n";
  }
  if (!os) throw DataError("write failed for '" + path.string() + "'");
}

Dataset load_dataset_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(is, line)) throw EmptyDataset("'" + path.string() + "' is empty");
  if (line.rfind("label", 0) != 0)
    throw DataError("'" + path.string() + "': expected CSV header starting with 'label'");
  std::int64_t d = std::count(line.begin(), line.end(), ',');
  if (d < 1) throw DataError("'" + path.string() + "': no feature columns");

  Dataset ds;
  ds.d = d;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    if (!std::getline(ss, cell, ',')) throw DataError("malformed CSV row: '" + line + "'");
    ds.labels.push_back(std::stod(cell));
    for (std::int64_t j = 0; j < d; ++j) {
      if (!std::getline(ss, cell, ',')) throw DataError("malformed CSV row: '" + line + "'");
      ds.x.push_back(std::stod(cell));
    }
  }
  if (ds.n() == 0) throw EmptyDataset("'" + path.string() + "' holds no samples");
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open '" + path.string() + "'");
  char magic[4] = {0, 0, 0, 0};
  is.read(magic, 4);
  is.close();
  if (std::memcmp(magic, kMagic, 4) == 0) return load_dataset_binary(path);
  return load_dataset_csv(path);
}

}  // namespace vccgm
