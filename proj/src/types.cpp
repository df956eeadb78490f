#include "gitnet/types.hpp"

#include "gitnet/errors.hpp"

namespace gitnet {

const char* to_string(Granularity g)
{
    return g == Granularity::Line ? "line" : "block";
}

const char* to_string(EditKind k)
{
    switch (k) {
    case EditKind::Deletion:
        return "deletion";
    case EditKind::Addition:
        return "addition";
    case EditKind::Replacement:
        return "replacement";
    }
    return "replacement";
}

Granularity granularity_from_string(const std::string& s)
{
    if (s == "line")
        return Granularity::Line;
    if (s == "block")
        return Granularity::Block;
    throw UsageError("unknown granularity: " + s);
}

EditKind edit_kind_from_string(const std::string& s)
{
    if (s == "deletion")
        return EditKind::Deletion;
    if (s == "addition")
        return EditKind::Addition;
    if (s == "replacement")
        return EditKind::Replacement;
    throw UsageError("unknown edit kind: " + s);
}

} // namespace gitnet
