#include "tss/commands.h"

#include <CLI11.hpp>
#include <fstream>
#include <sstream>

#include "tss/corpus.h"
#include "tss/subtyping.h"

#ifndef TSS_DEFAULT_CORPUS
#define TSS_DEFAULT_CORPUS "corpus"
#endif

namespace tss {

namespace {

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Usage("cannot write " + path);
  f << text;
}

Binding parse_binding(const std::string& s) {
  Binding b;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw Usage("malformed binding '" + item + "'");
    try {
      b[item.substr(0, eq)] = std::stoull(item.substr(eq + 1));
    } catch (std::exception&) {
      throw Usage("malformed binding '" + item + "'");
    }
  }
  return b;
}

struct Args {
  std::string file, out_path = "-", cost = "free", main, sched = "rr", trace, def, bind, filter,
              dir = TSS_DEFAULT_CORPUS, t1, t2;
  bool explicit_mode = false, check_config = false;
  size_t steps = 10000;
  std::vector<std::string> instances;
};

int cmd_check(const Args& a, std::ostream& out) {
  PipelineOptions o{parse_cost_model(a.cost), a.explicit_mode, a.instances};
  Program p = load_program(read_file(a.file), o);
  for (auto& d : p.diagnostics()) out << d << "\n";
  if (!p.ok()) {
    out << a.file << ": " << p.diagnostics().size() << " definition(s) rejected\n";
    return 1;
  }
  out << a.file << ": " << p.elaborated.defs.size() << " definition(s) ok\n";
  return 0;
}

int cmd_reconstruct(const Args& a, std::ostream& out, std::ostream& err) {
  PipelineOptions o{parse_cost_model(a.cost), false, a.instances};
  Program p = load_program(read_file(a.file), o);
  for (auto& d : p.diagnostics()) err << d << "\n";
  write_output(a.out_path, pretty_print(p.elaborated), out);
  return p.ok() ? 0 : 1;
}

int cmd_run(const Args& a, std::ostream& out, std::ostream& err) {
  PipelineOptions o{parse_cost_model(a.cost), a.explicit_mode, a.instances};
  std::string main = a.main;
  if (main.find('[') != std::string::npos) {
    o.instances.push_back(main);
    auto [n, args] = parse_instance(main);
    main = mangle(n, args);
  }
  Program p = load_program(read_file(a.file), o);
  if (!p.ok()) {
    for (auto& d : p.diagnostics()) err << d << "\n";
    return 1;
  }
  CheckedRun cr = run_checked(p, main, parse_scheduler(a.sched), a.steps, a.check_config);
  const RunResult& r = cr.result;
  if (!a.trace.empty()) {
    std::string text;
    if (a.trace.size() > 5 && a.trace.substr(a.trace.size() - 5) == ".json") {
      text = trace_json(r.trace) + "\n";
    } else {
      for (auto& s : r.trace) text += to_line(s) + "\n";
    }
    write_output(a.trace, text, out);
  }
  for (auto& ob : root_observations(r.final))
    out << ob.chan << " @" << ob.time << " " << ob.what << "\n";
  out << (r.status == RunStatus::Quiescent ? "quiescent" : "budget exhausted") << " after "
      << r.steps << " steps\n";
  if (cr.progress) {
    err << "progress violation: " << *cr.progress << "\n";
    return 1;
  }
  if (cr.preservation) {
    err << "configuration check failed " << *cr.preservation << "\n";
    return 1;
  }
  return 0;
}

int cmd_subtype(const Args& a, std::ostream& out) {
  Signature sig;
  if (!a.file.empty()) sig = ground_all(parse_program(read_file(a.file)));
  TypeEnv env(sig);
  TypeP t1 = parse_type(a.t1), t2 = parse_type(a.t2);
  bool r = is_subtype(env, t1, t2);
  out << (r ? "true" : "false") << "\n";
  return r ? 0 : 1;
}

int cmd_instantiate(const Args& a, std::ostream& out) {
  Signature sig = parse_program(read_file(a.file));
  write_output(a.out_path, pretty_print(instantiate(sig, a.def, parse_binding(a.bind))), out);
  return 0;
}

int cmd_corpus(const Args& a, std::ostream& out) {
  auto rows = run_corpus(a.dir, a.filter);
  size_t failed = 0;
  for (auto& r : rows) {
    out << (r.pass ? "PASS  " : "FAIL  ") << r.program << "  " << r.check;
    if (!r.detail.empty()) out << "  (" << r.detail << ")";
    out << "\n";
    failed += !r.pass;
  }
  out << rows.size() - failed << "/" << rows.size() << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"tss: temporal session types checker, reconstructor and interpreter"};
  app.require_subcommand(1);
  Args a;
  auto cost_opt = [&](CLI::App* s) {
    s->add_option("--cost", a.cost, "cost model: free, r, rs")
        ->check(CLI::IsMember({"free", "r", "rs"}));
    s->add_option("--instance", a.instances, "ground an instance such as append[1,2,0]");
  };
  auto* check = app.add_subcommand("check", "typecheck a program");
  check->add_option("FILE", a.file)->required();
  check->add_flag("--explicit", a.explicit_mode, "check as written, without reconstruction");
  cost_opt(check);
  auto* recon = app.add_subcommand("reconstruct", "insert delay, when? and now!");
  recon->add_option("FILE", a.file)->required();
  recon->add_option("-o", a.out_path, "output file ('-' for stdout)")->required();
  cost_opt(recon);
  auto* runc = app.add_subcommand("run", "execute a main process");
  runc->add_option("FILE", a.file)->required();
  runc->add_option("--main", a.main, "process to run, possibly an instance like tree_main[2]")
      ->required();
  runc->add_option("--sched", a.sched, "rr, sync, random or random:SEED");
  runc->add_option("--steps", a.steps, "step budget");
  runc->add_option("--trace", a.trace, "write the trace ('-' for stdout, *.json for JSON)");
  runc->add_flag("--check-config", a.check_config, "type the configuration after every step");
  runc->add_flag("--explicit", a.explicit_mode, "run as written, without reconstruction");
  cost_opt(runc);
  auto* sub = app.add_subcommand("subtype", "decide T1 <= T2");
  sub->add_option("T1", a.t1)->required();
  sub->add_option("T2", a.t2)->required();
  sub->add_option("--file", a.file, "program supplying type definitions");
  auto* inst = app.add_subcommand("instantiate", "ground a parameterized definition");
  inst->add_option("FILE", a.file)->required();
  inst->add_option("--def", a.def)->required();
  inst->add_option("--bind", a.bind, "parameter values, e.g. n=3,k=2");
  inst->add_option("-o", a.out_path, "output file ('-' for stdout)");
  auto* corp = app.add_subcommand("corpus", "run the bundled example suite");
  corp->add_option("--filter", a.filter, "only programs whose name contains this");
  corp->add_option("--dir", a.dir, "corpus directory");

  std::vector<std::string> rev(argv.rbegin(), argv.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    if (check->parsed()) return cmd_check(a, out);
    if (recon->parsed()) return cmd_reconstruct(a, out, err);
    if (runc->parsed()) return cmd_run(a, out, err);
    if (sub->parsed()) return cmd_subtype(a, out);
    if (inst->parsed()) return cmd_instantiate(a, out);
    if (corp->parsed()) return cmd_corpus(a, out);
  } catch (const ParseError& e) {
    err << (a.file.empty() ? "" : a.file + ":") << e.what() << "\n";
    return 2;
  } catch (const Usage& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const EvalError& e) {
    err << "instantiation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace tss
