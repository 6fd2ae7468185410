#include "handrec/ad/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>

#include "handrec/common/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace handrec::ad {

namespace {

constexpr char kMagic[4] = {'H', 'R', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::string& path) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  require(in.good(), "truncated checkpoint file ", path);
  return value;
}

}  // namespace

void save_tensors(const std::string& path, const NamedTensors& tensors) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open ", path, " for writing");
  out.write(kMagic, 4);
  write_pod<std::uint32_t>(out, kVersion);
  write_pod<std::uint64_t>(out, tensors.size());
  for (const auto& [name, tensor] : tensors) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(tensor.rank()));
    for (Eigen::Index d : tensor.shape)
      write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(d));
    out.write(reinterpret_cast<const char*>(tensor.data.data()),
              static_cast<std::streamsize>(tensor.size() * sizeof(double)));
  }
  require(out.good(), "I/O failure while writing ", path);
}

NamedTensors load_tensors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open checkpoint ", path);
  char magic[4];
  in.read(magic, 4);
  require(in.good() && std::equal(magic, magic + 4, kMagic),
          path, " is not a tensor checkpoint (bad magic)");
  const auto version = read_pod<std::uint32_t>(in, path);
  require(version == kVersion, path, ": unsupported version ", version);
  const auto count = read_pod<std::uint64_t>(in, path);

  NamedTensors tensors;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto name_len = read_pod<std::uint32_t>(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    require(in.good(), "truncated checkpoint file ", path);
    const auto rank = read_pod<std::uint32_t>(in, path);
    Shape shape(rank);
    for (auto& d : shape)
      d = static_cast<Eigen::Index>(read_pod<std::uint64_t>(in, path));
    Tensor t = Tensor::zeros(shape);
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
    require(in.good(), "truncated checkpoint file ", path);
    tensors.emplace(std::move(name), std::move(t));
  }
  return tensors;
}

}  // namespace handrec::ad
