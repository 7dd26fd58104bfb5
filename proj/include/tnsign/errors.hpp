#pragma once

#include <stdexcept>
#include <string>

namespace tnsign {

enum class Errc {
  ok = 0,
  argument,    // bad argument (leg index, rank, chi, ...)
  dimension,   // shape/dimension mismatch between operands
  size_guard,  // exact-contraction guard exceeded
  config,      // invalid experiment configuration
  format,      // malformed file contents
  io,          // file system failure
  internal,    // should-not-happen
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool cond, Errc code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace tnsign
