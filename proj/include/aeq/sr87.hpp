#pragma once

#include <string>

#include "aeq/atomdata.hpp"

namespace aeq::atomdata {

// Bundled 87Sr species document (JSON text, same content as data/sr87.json).
const std::string& sr87_document();

// Parsed bundled model; constructed once, immutable thereafter.
const SpeciesModel& sr87();

}  // namespace aeq::atomdata
