#include "depmig/model.hpp"

#include "depmig/error.hpp"

#include <charconv>

namespace depmig {

LibraryId LibraryId::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size() ||
        text.find(':', colon + 1) != std::string_view::npos) {
        throw UsageError("expected group:artifact, got '" + std::string(text) + "'");
    }
    return {std::string(text.substr(0, colon)), std::string(text.substr(colon + 1))};
}

std::string MethodRef::simple_class_name() const {
    const auto dot = class_name.rfind('.');
    return dot == std::string::npos ? class_name : class_name.substr(dot + 1);
}

MethodRef MethodRef::parse(std::string_view text) {
    const auto slash = text.rfind('/');
    if (slash == std::string_view::npos) {
        throw UsageError("method reference without arity: " + std::string(text));
    }
    const auto head = text.substr(0, slash);
    const auto dot = head.rfind('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == head.size()) {
        throw UsageError("malformed method reference: " + std::string(text));
    }
    MethodRef ref{std::string(head.substr(0, dot)), std::string(head.substr(dot + 1)), 0};
    const auto digits = text.substr(slash + 1);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), ref.arity);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
        throw UsageError("malformed arity in method reference: " + std::string(text));
    }
    return ref;
}

} // namespace depmig
