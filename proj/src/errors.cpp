#include "smartground/errors.hpp"

namespace smartground {

namespace {

std::string located(const SourceSpan& span, const std::string& message) {
    return std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + message;
}

std::string join_variables(const std::vector<std::string>& vars) {
    std::string out;
    for (const auto& v : vars) {
        if (!out.empty()) out += ", ";
        out += v;
    }
    return out;
}

}  // namespace

SyntaxError::SyntaxError(SourceSpan span, const std::string& message)
    : Error(located(span, message)), span_(span) {}

UnsupportedFeature::UnsupportedFeature(SourceSpan span, const std::string& feature)
    : SyntaxError(span, "unsupported syntax: " + feature) {}

SafetyError::SafetyError(std::string rule, std::vector<std::string> variables)
    : Error("unsafe rule `" + rule + "`: unbound variables " + join_variables(variables)),
      rule_(std::move(rule)),
      variables_(std::move(variables)) {}

}  // namespace smartground
