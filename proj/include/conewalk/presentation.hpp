#pragma once

#include <string>

#include "conewalk/letters.hpp"

namespace conewalk {

enum class GroupKind { Surface, Free };

// A supported group presentation: either the standard one-relator surface
// presentation of genus g >= 2 (generators a1,b1,...,ag,bg and relator
// prod_i [a_i, b_i]) or a free group of rank k >= 2 with no relator.
class Presentation {
public:
    static Presentation surface(int genus);
    static Presentation free_group(int rank);

    GroupKind kind() const { return kind_; }
    // genus for surface groups, rank for free groups
    int parameter() const { return parameter_; }
    int generator_count() const { return generators_; }
    int alphabet_size() const { return 2 * generators_; }
    const Word& relator() const { return relator_; }
    std::string describe() const;

private:
    Presentation(GroupKind kind, int parameter, int generators, Word relator)
        : kind_(kind), parameter_(parameter), generators_(generators), relator_(std::move(relator)) {}

    GroupKind kind_;
    int parameter_;
    int generators_;
    Word relator_;
};

} // namespace conewalk
