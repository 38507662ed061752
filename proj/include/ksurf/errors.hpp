#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ksurf {

// Exit-code classes shared by every command.
enum class ErrorClass { Validation = 1, Solver = 2, Precondition = 3, Io = 4 };

class KsurfError : public std::runtime_error {
 public:
  KsurfError(ErrorClass cls, std::string code, const std::string& what)
      : std::runtime_error(what), cls_(cls), code_(std::move(code)) {}
  ErrorClass error_class() const { return cls_; }
  // Stable machine-readable identifier, e.g. "invalid_chart_point".
  const std::string& code() const { return code_; }

 private:
  ErrorClass cls_;
  std::string code_;
};

// Violated mathematical hypothesis. `condition` names the hypothesis in
// reports (for example "0 < k < c").
class PreconditionError : public KsurfError {
 public:
  PreconditionError(std::string code, std::string condition, const std::string& what,
                    std::vector<int> witnesses = {})
      : KsurfError(ErrorClass::Precondition, std::move(code), what),
        condition_(std::move(condition)),
        witnesses_(std::move(witnesses)) {}
  const std::string& condition() const { return condition_; }
  const std::vector<int>& witnesses() const { return witnesses_; }

 private:
  std::string condition_;
  std::vector<int> witnesses_;
};

class SolverError : public KsurfError {
 public:
  SolverError(std::string code, const std::string& what)
      : KsurfError(ErrorClass::Solver, std::move(code), what) {}
};

class IoError : public KsurfError {
 public:
  IoError(std::string code, const std::string& what)
      : KsurfError(ErrorClass::Io, std::move(code), what) {}
};

}  // namespace ksurf
