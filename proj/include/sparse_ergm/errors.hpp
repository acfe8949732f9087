#ifndef SPARSE_ERGM_ERRORS_HPP
#define SPARSE_ERGM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sparse_ergm {

enum class ErrorKind {
  domain,      // invalid argument value
  capability,  // input valid but beyond what the implementation supports
  hypothesis,  // a theorem hypothesis does not hold for the supplied data
  config,      // inconsistent run configuration
  internal     // an internal consistency check failed
};

inline const char* error_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "DOMAIN";
    case ErrorKind::capability: return "CAPABILITY";
    case ErrorKind::hypothesis: return "HYPOTHESIS";
    case ErrorKind::config: return "CONFIG";
    case ErrorKind::internal: return "INTERNAL";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

struct CapabilityError : Error {
  explicit CapabilityError(const std::string& what) : Error(ErrorKind::capability, what) {}
};

struct HypothesisError : Error {
  explicit HypothesisError(const std::string& what) : Error(ErrorKind::hypothesis, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

struct InternalError : Error {
  explicit InternalError(const std::string& what) : Error(ErrorKind::internal, what) {}
};

}  // namespace sparse_ergm

#endif  // SPARSE_ERGM_ERRORS_HPP
