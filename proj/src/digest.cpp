#include "chattox/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include "chattox/error.hpp"

namespace chattox {

namespace {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

std::string to_hex(const unsigned char* bytes, unsigned int len) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[bytes[i] >> 4]);
    out.push_back(kHex[bytes[i] & 0x0f]);
  }
  return out;
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("sha256: digest init failed");
    }
  }
  void update(const void* data, std::size_t len) {
    if (EVP_DigestUpdate(ctx_.get(), data, len) != 1) {
      throw std::runtime_error("sha256: digest update failed");
    }
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1) {
      throw std::runtime_error("sha256: digest final failed");
    }
    return to_hex(md.data(), len);
  }

 private:
  MdCtx ctx_;
};

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedDump: return "MalformedDump";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::DuplicateStream: return "DuplicateStream";
    case ErrorCode::FileNotReadable: return "FileNotReadable";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::ReplayMiss: return "ReplayMiss";
    case ErrorCode::StoreCorrupt: return "StoreCorrupt";
    case ErrorCode::DegenerateAgreement: return "DegenerateAgreement";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::GroupTooSmall: return "GroupTooSmall";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::UnitTooSmall: return "UnitTooSmall";
    case ErrorCode::InsufficientClass: return "InsufficientClass";
    case ErrorCode::RowMismatch: return "RowMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::StageMissingInput: return "StageMissingInput";
  }
  return "Unknown";
}

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex();
}

std::string short_digest(std::string_view data, std::size_t chars) {
  return sha256_hex(data).substr(0, chars);
}

std::string file_sha256_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotReadable, path.string());
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

}  // namespace chattox
