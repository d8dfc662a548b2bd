#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace smartground {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SourceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t line = 1;
    std::size_t column = 1;
};

class SyntaxError : public Error {
public:
    SyntaxError(SourceSpan span, const std::string& message);
    const SourceSpan& span() const noexcept { return span_; }

private:
    SourceSpan span_;
};

/// Aggregates, choice rules, queries, weak constraints and directives are
/// rejected rather than skipped.
class UnsupportedFeature : public SyntaxError {
public:
    UnsupportedFeature(SourceSpan span, const std::string& feature);
};

class SafetyError : public Error {
public:
    SafetyError(std::string rule, std::vector<std::string> variables);
    const std::string& rule() const noexcept { return rule_; }
    const std::vector<std::string>& variables() const noexcept { return variables_; }

private:
    std::string rule_;
    std::vector<std::string> variables_;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class DecompositionDegenerate : public Error {
public:
    DecompositionDegenerate() : Error("tree decomposition has a single useful node") {}
};

class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace smartground
