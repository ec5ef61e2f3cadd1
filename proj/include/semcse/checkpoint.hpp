#pragma once

// Binary checkpoint layout (all little-endian):
//
//   "SEMC"                  4 bytes magic
//   version                 u32 (currently 1)
//   vocab_size, E, H, D     u64 each
//   dropout p               f64
//   weights                 f64, row-major: embedding, W1, b1, W2, b2
//
// The vocabulary is written next to the checkpoint as `<path>.vocab`.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "semcse/encoder.hpp"
#include "semcse/error.hpp"
#include "semcse/vocab.hpp"

namespace semcse {

inline constexpr std::array<char, 4> kCheckpointMagic = {'S', 'E', 'M', 'C'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

template <typename UInt>
void write_le(std::ostream& out, UInt v) {
  std::array<char, sizeof(UInt)> bytes{};
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFU);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename UInt>
UInt read_le(std::istream& in) {
  std::array<unsigned char, sizeof(UInt)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw Error("checkpoint is truncated");
  }
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    v |= static_cast<UInt>(bytes[i]) << (8 * i);
  }
  return v;
}

inline void write_f64(std::ostream& out, double v) { write_le(out, std::bit_cast<std::uint64_t>(v)); }
inline double read_f64(std::istream& in) { return std::bit_cast<double>(read_le<std::uint64_t>(in)); }

}  // namespace detail

inline void write_checkpoint(const EncoderParams& params, std::ostream& out) {
  const auto& d = params.dims();
  out.write(kCheckpointMagic.data(), kCheckpointMagic.size());
  detail::write_le<std::uint32_t>(out, kCheckpointVersion);
  detail::write_le<std::uint64_t>(out, d.vocab_size);
  detail::write_le<std::uint64_t>(out, d.embed);
  detail::write_le<std::uint64_t>(out, d.hidden);
  detail::write_le<std::uint64_t>(out, d.output);
  detail::write_f64(out, params.dropout());
  for (const double v : params.flat()) {
    detail::write_f64(out, v);
  }
}

inline EncoderParams read_checkpoint(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kCheckpointMagic) {
    throw Error("not a checkpoint file (bad magic)");
  }
  const auto version = detail::read_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw Error("unsupported checkpoint version " + std::to_string(version));
  }
  EncoderDims dims;
  dims.vocab_size = detail::read_le<std::uint64_t>(in);
  dims.embed = detail::read_le<std::uint64_t>(in);
  dims.hidden = detail::read_le<std::uint64_t>(in);
  dims.output = detail::read_le<std::uint64_t>(in);
  const double p = detail::read_f64(in);
  // Guards allocation against corrupt headers.
  constexpr std::uint64_t kMaxDim = std::uint64_t{1} << 24;
  if (dims.vocab_size > kMaxDim || dims.embed > kMaxDim || dims.hidden > kMaxDim || dims.output > kMaxDim ||
      dims.parameter_count() > (std::uint64_t{1} << 31)) {
    throw Error("checkpoint header declares implausible dimensions");
  }
  EncoderParams params(dims, p);
  for (auto& v : params.flat()) {
    v = detail::read_f64(in);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error("checkpoint has trailing bytes");
  }
  if (!params.all_finite()) {
    throw Error("checkpoint contains non-finite weights");
  }
  return params;
}

inline std::string vocab_path_for(const std::string& checkpoint_path) { return checkpoint_path + ".vocab"; }

inline void save_model(const Model& model, const std::string& path) {
  if (model.vocab.size() != model.params.dims().vocab_size) {
    throw Error("vocabulary size does not match encoder parameters");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write checkpoint " + path);
  }
  write_checkpoint(model.params, out);
  model.vocab.save(vocab_path_for(path));
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open checkpoint " + path);
  }
  Model m{Vocabulary::load(vocab_path_for(path)), read_checkpoint(in)};
  if (m.vocab.size() != m.params.dims().vocab_size) {
    throw Error("vocabulary " + vocab_path_for(path) + " does not match checkpoint " + path);
  }
  return m;
}

}  // namespace semcse
