#include "vccgm/params.hpp"

#include <cstring>
#include <fstream>

#include "vccgm/errors.hpp"

namespace vccgm {

namespace {

constexpr char kMagic[4] = {'V', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw DataError("checkpoint file truncated");
  return v;
}

}  // namespace

Tensor& ParamStore::at(const std::string& name) {
  auto it = arrays.find(name);
  if (it == arrays.end()) throw Error("parameter '" + name + "' not found");
  return it->second;
}

const Tensor& ParamStore::at(const std::string& name) const {
  auto it = arrays.find(name);
  if (it == arrays.end()) throw Error("parameter '" + name + "' not found");
  return it->second;
}

void ParamStore::add(const std::string& name, Tensor t) {
  if (has(name)) throw Error("parameter '" + name + "' already present");
  arrays.emplace(name, std::move(t));
}

std::int64_t ParamStore::total_elems() const {
  std::int64_t n = 0;
  for (const auto& [name, t] : arrays) n += t.size();
  return n;
}

bool ParamStore::same_layout(const ParamStore& other) const {
  if (arrays.size() != other.arrays.size()) return false;
  auto a = arrays.begin();
  auto b = other.arrays.begin();
  for (; a != arrays.end(); ++a, ++b)
    if (a->first != b->first || !a->second.same_shape(b->second)) return false;
  return true;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot open '" + tmp.string() + "' for writing");
    os.write(kMagic, 4);
    write_pod(os, kVersion);
    write_pod(os, static_cast<std::uint64_t>(ckpt.meta_json.size()));
    os.write(ckpt.meta_json.data(), static_cast<std::streamsize>(ckpt.meta_json.size()));
    std::uint64_t count = 0;
    for (const auto& [section, store] : ckpt.sections) count += store.arrays.size();
    write_pod(os, count);
    for (const auto& [section, store] : ckpt.sections) {
      for (const auto& [name, t] : store.arrays) {
        std::string full = section + "/" + name;
        write_pod(os, static_cast<std::uint32_t>(full.size()));
        os.write(full.data(), static_cast<std::streamsize>(full.size()));
        write_pod(os, static_cast<std::uint64_t>(t.rows));
        write_pod(os, static_cast<std::uint64_t>(t.cols));
        os.write(reinterpret_cast<const char*>(t.data.data()),
                 static_cast<std::streamsize>(sizeof(double) * t.data.size()));
      }
    }
    if (!os) throw DataError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open '" + path.string() + "'");
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("'" + path.string() + "' is not a checkpoint file");
  auto version = read_pod<std::uint32_t>(is);
  if (version != kVersion)
    throw DataError("unsupported checkpoint version " + std::to_string(version));

  Checkpoint ckpt;
  auto meta_len = read_pod<std::uint64_t>(is);
  ckpt.meta_json.resize(meta_len);
  is.read(ckpt.meta_json.data(), static_cast<std::streamsize>(meta_len));
  if (!is) throw DataError("checkpoint file truncated");

  auto count = read_pod<std::uint64_t>(is);
  for (std::uint64_t i = 0; i < count; ++i) {
    auto name_len = read_pod<std::uint32_t>(is);
    std::string full(name_len, '\0');
    is.read(full.data(), name_len);
    if (!is) throw DataError("checkpoint file truncated");
    auto rows = static_cast<std::int64_t>(read_pod<std::uint64_t>(is));
    auto cols = static_cast<std::int64_t>(read_pod<std::uint64_t>(is));
    Tensor t(rows, cols);
    is.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(sizeof(double) * t.data.size()));
    if (!is) throw DataError("checkpoint file truncated");
    auto slash = full.find('/');
    if (slash == std::string::npos)
      throw DataError("checkpoint array '" + full + "' has no section prefix");
    ckpt.sections[full.substr(0, slash)].add(full.substr(slash + 1), std::move(t));
  }
  return ckpt;
}

}  // namespace vccgm
