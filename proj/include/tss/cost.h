#pragma once

#include <stdexcept>
#include <string>

#include "tss/syntax.h"

namespace tss {

enum class CostModel { Free, R, RS };

struct InstrumentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

CostModel parse_cost_model(const std::string& s);
std::string to_string(CostModel m);

ProcP instrument(const ProcP& p, CostModel m);
Signature instrument(const Signature& sig, CostModel m);

ProcP erase_ticks(const ProcP& p);
Signature erase_ticks(const Signature& sig);

}  // namespace tss
