#include "tss/cost.h"

namespace tss {

CostModel parse_cost_model(const std::string& s) {
  if (s == "free") return CostModel::Free;
  if (s == "r") return CostModel::R;
  if (s == "rs") return CostModel::RS;
  throw std::invalid_argument("unknown cost model '" + s + "' (free, r, rs)");
}

std::string to_string(CostModel m) {
  switch (m) {
    case CostModel::Free: return "free";
    case CostModel::R: return "r";
    case CostModel::RS: return "rs";
  }
  return "";
}

namespace {

ProcP tick(ProcP cont) {
  Pos pos = cont->pos;
  return p_delay(1, Origin::Tick, std::move(cont), pos);
}

ProcP walk(const ProcP& p, CostModel m) {
  if (!p) return p;
  if (p->kind == PK::Delay && p->origin == Origin::Tick)
    throw InstrumentError("program already contains tick annotations");
  Proc q = *p;
  q.body = walk(p->body, m);
  q.cont = walk(p->cont, m);
  for (auto& [l, b] : q.branches) b = tick(walk(b, m));
  switch (p->kind) {
    case PK::Wait:
    case PK::RecvChan: q.cont = tick(q.cont); break;
    case PK::SendLabel:
    case PK::SendChan:
      if (m == CostModel::RS) q.cont = tick(q.cont);
      break;
    default: break;
  }
  return std::make_shared<const Proc>(std::move(q));
}

}  // namespace

ProcP instrument(const ProcP& p, CostModel m) {
  if (m == CostModel::Free) return p;
  return walk(p, m);
}

Signature instrument(const Signature& sig, CostModel m) {
  Signature out = sig;
  for (auto& d : out.defs)
    for (auto& c : d.clauses) c.body = instrument(c.body, m);
  return out;
}

ProcP erase_ticks(const ProcP& p) {
  if (!p) return p;
  if (p->kind == PK::Delay && p->origin == Origin::Tick) return erase_ticks(p->cont);
  Proc q = *p;
  q.body = erase_ticks(p->body);
  q.cont = erase_ticks(p->cont);
  for (auto& [l, b] : q.branches) b = erase_ticks(b);
  return std::make_shared<const Proc>(std::move(q));
}

Signature erase_ticks(const Signature& sig) {
  Signature out = sig;
  for (auto& d : out.defs)
    for (auto& c : d.clauses) c.body = erase_ticks(c.body);
  return out;
}

}  // namespace tss
