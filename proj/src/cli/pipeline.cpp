#include "tss/pipeline.h"

#include <fstream>
#include <set>
#include <sstream>

namespace tss {

std::pair<std::string, std::vector<uint64_t>> parse_instance(const std::string& s) {
  auto lb = s.find('[');
  if (lb == std::string::npos) return {s, {}};
  if (s.back() != ']') throw std::invalid_argument("malformed instance '" + s + "'");
  std::vector<uint64_t> args;
  std::stringstream ss(s.substr(lb + 1, s.size() - lb - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    try {
      args.push_back(std::stoull(item, &used));
    } catch (std::exception&) {
      used = 0;
    }
    if (used == 0) throw std::invalid_argument("malformed instance argument '" + item + "'");
  }
  return {s.substr(0, lb), args};
}

Signature merge(Signature a, const Signature& b) {
  for (auto& t : b.types)
    if (!a.find_type(t.name)) a.types.push_back(t);
  for (auto& d : b.decls)
    if (!a.find_decl(d.name)) a.decls.push_back(d);
  for (auto& d : b.defs)
    if (!a.find_def(d.name)) a.defs.push_back(d);
  return a;
}

std::vector<std::string> Program::diagnostics() const {
  std::vector<std::string> out;
  for (auto& e : elab_errors)
    out.push_back(e.def + ": " + (e.kind == ElabError::Kind::Type ? "" : "reconstruction: ") +
                  e.message);
  for (auto& e : check_errors) out.push_back(e.def + ": " + e.render());
  return out;
}

Program load_program(const std::string& text, const PipelineOptions& opts) {
  Program p;
  p.source = parse_program(text);
  p.ground = ground_all(p.source);
  for (auto& inst : opts.instances) {
    auto [name, args] = parse_instance(inst);
    std::string root;
    p.ground = merge(p.ground, instantiate_call(p.source, name, args, &root));
    p.roots.push_back(root);
  }
  check_contractive(p.ground);
  p.instrumented = instrument(p.ground, opts.cost);
  if (opts.explicit_mode) {
    p.elaborated = p.instrumented;
  } else {
    TypeEnv env(p.instrumented);
    p.elaborated = elaborate_signature(env, &p.elab_errors);
  }
  p.env = std::make_shared<TypeEnv>(p.elaborated);
  std::vector<TypeError> errs = check_signature(*p.env);
  std::set<std::string> failed;
  for (auto& e : p.elab_errors) failed.insert(e.def);
  for (auto& e : errs)
    if (!failed.count(e.def)) p.check_errors.push_back(e);
  return p;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace tss
