#include "arglink/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>

#include "arglink/errors.h"
#include "json.hpp"

namespace arglink {
namespace {

constexpr char kMagic[4] = {'A', 'L', 'C', 'K'};

template <typename T>
void put(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in, const char* what) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw FormatError(std::string("checkpoint truncated while reading ") + what);
  }
  return v;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& c) {
  nlohmann::ordered_json manifest;
  manifest["format"] = "arglink-checkpoint";
  manifest["version"] = kCheckpointVersion;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [k, v] : c.config.entries()) config[k] = v;
  manifest["config"] = config;
  manifest["roles"] = c.roles;
  manifest["best_dev_f1"] = c.best_dev_f1;
  manifest["epoch"] = c.epoch;
  auto tensors = nlohmann::ordered_json::array();
  for (const auto& t : c.tensors) {
    if (t.data.size() != static_cast<std::size_t>(t.rows) * t.cols) {
      throw std::logic_error("tensor " + t.name + " has inconsistent shape");
    }
    tensors.push_back({{"name", t.name}, {"shape", {t.rows, t.cols}}, {"dtype", "float32"}});
  }
  manifest["tensors"] = tensors;
  const std::string text = manifest.dump();

  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& t : c.tensors) {
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(float)));
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  write_checkpoint(out, c);
  if (!out) throw std::runtime_error("error writing checkpoint " + path);
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[4];
  if (!in.read(magic, sizeof magic)) throw FormatError("checkpoint truncated while reading magic");
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw FormatError("not a checkpoint file");
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kCheckpointVersion) + ")");
  }
  const auto length = get<std::uint64_t>(in, "manifest length");
  if (length > (1ULL << 30)) throw FormatError("checkpoint manifest length is implausible");
  std::string text(length, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(length))) {
    throw FormatError("checkpoint truncated while reading manifest");
  }

  Checkpoint c;
  try {
    const auto manifest = nlohmann::json::parse(text);
    for (const auto& [k, v] : manifest.at("config").items()) c.config.set(k, v.get<std::string>());
    c.roles = manifest.at("roles").get<std::vector<std::string>>();
    c.best_dev_f1 = manifest.at("best_dev_f1").get<double>();
    c.epoch = manifest.at("epoch").get<int>();
    for (const auto& t : manifest.at("tensors")) {
      if (t.at("dtype") != "float32") throw FormatError("unsupported tensor dtype");
      Tensor tensor;
      tensor.name = t.at("name").get<std::string>();
      tensor.rows = t.at("shape").at(0).get<int>();
      tensor.cols = t.at("shape").at(1).get<int>();
      if (tensor.rows < 0 || tensor.cols < 0) throw FormatError("negative tensor shape");
      c.tensors.push_back(std::move(tensor));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad checkpoint manifest: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("bad checkpoint config: ") + e.what());
  }
  for (auto& t : c.tensors) {
    t.data.resize(static_cast<std::size_t>(t.rows) * t.cols);
    if (!in.read(reinterpret_cast<char*>(t.data.data()),
                 static_cast<std::streamsize>(t.data.size() * sizeof(float)))) {
      throw FormatError("checkpoint truncated in tensor " + t.name);
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after checkpoint tensors");
  }
  return c;
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  return read_checkpoint(in);
}

}  // namespace arglink
