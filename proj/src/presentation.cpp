#include "conewalk/presentation.hpp"

#include <stdexcept>

namespace conewalk {

namespace {
constexpr int kMaxGenerators = 120; // letter codes must fit one byte
}

Presentation Presentation::surface(int genus) {
    if (genus < 2) throw std::invalid_argument("surface genus must be >= 2");
    if (2 * genus > kMaxGenerators) throw std::invalid_argument("surface genus too large");
    Word relator;
    relator.reserve(4 * static_cast<std::size_t>(genus));
    for (int i = 0; i < genus; ++i) {
        const std::uint8_t a = static_cast<std::uint8_t>(4 * i);     // a_{i+1}
        const std::uint8_t b = static_cast<std::uint8_t>(4 * i + 2); // b_{i+1}
        relator.push_back(Letter{a});
        relator.push_back(Letter{b});
        relator.push_back(Letter{a}.inverse());
        relator.push_back(Letter{b}.inverse());
    }
    return Presentation(GroupKind::Surface, genus, 2 * genus, std::move(relator));
}

Presentation Presentation::free_group(int rank) {
    if (rank < 2) throw std::invalid_argument("free rank must be >= 2");
    if (rank > kMaxGenerators) throw std::invalid_argument("free rank too large");
    return Presentation(GroupKind::Free, rank, rank, Word{});
}

std::string Presentation::describe() const {
    if (kind_ == GroupKind::Surface) return "surface group, genus " + std::to_string(parameter_);
    return "free group, rank " + std::to_string(parameter_);
}

} // namespace conewalk
