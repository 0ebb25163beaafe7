#pragma once

#include "reclift/store.hpp"

namespace reclift {

// Declares the global schema: principal statement and edge relations for
// every IR level plus the auxiliary analysis relations.
void declare_level_schemas(Store& store);

std::vector<RelationSchema> level_schemas();

}  // namespace reclift
