#include "hhta/stable.hpp"

namespace hhta {
namespace {

// Generated at configure time from data/alpha_lookup_symmetric.txt.
constexpr const char* kEmbeddedTable =
#include "alpha_lookup_symmetric.inc"
    ;

}  // namespace

const AlphaLookup& default_lookup() {
    static const AlphaLookup table = AlphaLookup::from_text(kEmbeddedTable);
    return table;
}

}  // namespace hhta
