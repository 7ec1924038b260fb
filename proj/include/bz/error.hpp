#pragma once

#include <stdexcept>
#include <string>

namespace bz {

/// Base class for every failure raised by the library. `name()` is the stable
/// identifier printed by the command-line tool.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(what), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

#define BZ_DEFINE_ERROR(Type)                                    \
  class Type : public Error {                                    \
   public:                                                       \
    explicit Type(const std::string& what) : Error(#Type, what) {} \
  };

// Pole hit, argument outside the admissible interval, invalid parameters.
BZ_DEFINE_ERROR(DomainError)
BZ_DEFINE_ERROR(InvalidArgument)
BZ_DEFINE_ERROR(NoHopfRoots)
BZ_DEFINE_ERROR(DegenerateFold)
BZ_DEFINE_ERROR(SignChangeNotFound)
BZ_DEFINE_ERROR(NoCrossing)
BZ_DEFINE_ERROR(NoConvergence)
BZ_DEFINE_ERROR(ConvergedToEquilibrium)
BZ_DEFINE_ERROR(BracketInvalid)

#undef BZ_DEFINE_ERROR

}  // namespace bz
