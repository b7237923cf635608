#include "pano/io/codec.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <memory>

#include "pano/core/error.hpp"

namespace pano::io {

namespace {

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

struct Sha256 {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};

  Sha256() {
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error(Errc::io, "sha256 init failed");
  }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx.get(), data, n); }
  std::string hex() {
    std::array<std::uint8_t, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    return to_hex({md.data(), len});
  }
};

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_hex(std::string_view text) {
  Sha256 h;
  h.update(text.data(), text.size());
  return h.hex();
}

std::string clip_digest(const Clip& clip) {
  Sha256 h;
  const std::array<std::uint32_t, 4> header{static_cast<std::uint32_t>(clip.fps()),
                                            static_cast<std::uint32_t>(clip.width()),
                                            static_cast<std::uint32_t>(clip.height()),
                                            static_cast<std::uint32_t>(clip.size())};
  for (auto v : header) {
    const std::uint8_t le[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                                static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
    h.update(le, 4);
  }
  for (const auto& f : clip.frames()) h.update(f->pixels().data(), f->pixels().size());
  return h.hex();
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::size_t base64_decoded_size(std::string_view text) {
  std::size_t chars = 0, pad = 0;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    ++chars;
    if (c == '=') ++pad;
  }
  return chars / 4 * 3 - std::min<std::size_t>(pad, 2);
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::string clean;
  clean.reserve(text.size());
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) clean.push_back(c);
  }
  if (clean.size() % 4 != 0) throw Error(Errc::invalid_input, "base64 length is not a multiple of 4");
  const auto pad_at = clean.find('=');
  if (pad_at != std::string::npos &&
      (pad_at + 2 < clean.size() || clean.find_first_not_of('=', pad_at) != std::string::npos)) {
    throw Error(Errc::invalid_input, "misplaced base64 padding");
  }
  std::vector<std::uint8_t> out(clean.size() / 4 * 3);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(clean.data()),
                                static_cast<int>(clean.size()));
  if (n < 0) throw Error(Errc::invalid_input, "invalid base64");
  // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
  const std::size_t pad = clean.size() - std::min(clean.size(), pad_at == std::string::npos ? clean.size() : pad_at);
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

std::string random_hex_id() {
  std::array<std::uint8_t, 16> bytes{};
  if (RAND_bytes(bytes.data(), static_cast<int>(bytes.size())) != 1) throw Error(Errc::io, "RAND_bytes failed");
  return to_hex(bytes);
}

}  // namespace pano::io
