#pragma once

#include <stdexcept>
#include <string>

namespace weakperf {

/// Argument outside the closed-form domain of a formula.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A set construction (lengths, disc tree) could not be completed.
class ConstructionError : public std::runtime_error {
 public:
  explicit ConstructionError(const std::string& what, int level = -1)
      : std::runtime_error(what), level_(level) {}
  int level() const { return level_; }

 private:
  int level_;
};

/// Witness search found an empty annulus; carries the annulus that disproves
/// h-uniform perfectness at that scale and resolution.
class WitnessNotFound : public ConstructionError {
 public:
  WitnessNotFound(const std::string& what, int level, std::size_t center_index,
                  long double inner, long double outer)
      : ConstructionError(what, level),
        center_index_(center_index),
        inner_(inner),
        outer_(outer) {}
  std::size_t center_index() const { return center_index_; }
  long double inner() const { return inner_; }
  long double outer() const { return outer_; }

 private:
  std::size_t center_index_;
  long double inner_;
  long double outer_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedDomain : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace weakperf
