#include "bfgp/cli.hpp"

#include <sys/resource.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "bfgp/domains.hpp"
#include "bfgp/error.hpp"
#include "bfgp/evaluation.hpp"
#include "bfgp/interpreter.hpp"
#include "bfgp/kernels.hpp"
#include "bfgp/model_io.hpp"
#include "bfgp/pddl.hpp"
#include "bfgp/search.hpp"

namespace bfgp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kDefaultTimeout = 3600.0;
constexpr Value kSynthesisBound = 100;
constexpr Value kValidationBound = 1'000'000'000;
constexpr std::uint64_t kDefaultStepLimit = 10'000'000;

template <typename T>
T env_or(const char* name, T fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  try {
    if constexpr (std::is_floating_point_v<T>) {
      return static_cast<T>(std::stod(v));
    } else {
      return static_cast<T>(std::stoull(v));
    }
  } catch (const std::exception&) {
    throw Error(ErrorKind::invalid_argument, std::string("bad value for ") + name + ": '" + v + "'");
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path.string());
  out << text;
}

long peak_rss_kb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return usage.ru_maxrss;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Problem {
  std::string source;
  bool builtin = false;
  Domain domain;
  std::vector<Pointer> pointers;
  std::vector<Instance> instances;
};

// A builtin domain name, or a directory with domain.txt plus instance files
// read in file-name order.
Problem load_problem(const std::string& domain_arg, const std::string& pointer_arg, InstanceSet set,
                     std::size_t count, std::uint64_t seed) {
  if (domain_arg.empty()) throw Error(ErrorKind::invalid_argument, "--domain is required");
  Problem p;
  p.source = domain_arg;
  if (fs::is_directory(domain_arg)) {
    p.domain = parse_domain(read_file(fs::path(domain_arg) / "domain.txt"));
    p.pointers = pointer_arg.empty() ? default_pointers(p.domain) : parse_pointer_declaration(pointer_arg, p.domain);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(domain_arg))
      if (entry.is_regular_file() && entry.path().extension() == ".txt" && entry.path().filename() != "domain.txt")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) p.instances.push_back(parse_instance(read_file(f), p.domain, p.pointers));
    if (p.instances.empty()) throw Error(ErrorKind::invalid_argument, "no instance files in " + domain_arg);
    return p;
  }
  p.builtin = true;
  p.domain = builtin_domain(domain_arg).domain;
  p.pointers = pointer_arg.empty() ? default_pointers(p.domain) : parse_pointer_declaration(pointer_arg, p.domain);
  p.instances = generate_instances(domain_arg, set, count ? std::optional<std::size_t>(count) : std::nullopt, seed);
  return p;
}

json pointers_json(const Domain& d, const std::vector<Pointer>& pointers) {
  json arr = json::array();
  for (const auto& p : pointers) arr.push_back({{"name", p.name}, {"type", d.types[p.type]}});
  return arr;
}

void write_report(const std::string& path, const json& report) {
  if (!path.empty()) write_file(path, report.dump(2) + "\n");
}

// Domain file followed by one file per instance, zero-padded so that
// directory order matches instance order.
void write_problem_dir(const fs::path& dir, Domain domain, const std::vector<Pointer>& pointers,
                       const std::vector<Instance>& instances) {
  fs::create_directories(dir);
  domain.default_pointers.clear();
  for (const auto& p : pointers) domain.default_pointers.push_back({p.name, p.type});
  write_file(dir / "domain.txt", print_domain(domain));
  char prefix[16];
  for (std::size_t k = 0; k < instances.size(); ++k) {
    std::snprintf(prefix, sizeof prefix, "%05zu-", k);
    write_file(dir / (prefix + instances[k].name + ".txt"), print_instance(instances[k], domain, pointers));
  }
}

struct Common {
  std::string domain;
  std::string pointers;
  std::string json_path;
  std::size_t count = 0;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--domain", c.domain, "Builtin domain name or directory with domain.txt and instances");
  cmd->add_option("--pointers", c.pointers, "Pointer declaration: k, type:k,... or name:type,...");
  cmd->add_option("--count", c.count, "Number of generated instances (builtin domains)");
  cmd->add_option("--seed", c.seed, "Instance generator seed")->capture_default_str();
  cmd->add_option("--json", c.json_path, "Write a JSON report to this file");
}

json command_echo(const std::vector<std::string>& args) { return json(args); }

struct SynthOptions {
  Common common;
  std::size_t lines = 0;
  std::string eval = "f5,f7";
  double timeout = kDefaultTimeout;
  std::size_t max_nodes = 0;
  Value bound = kSynthesisBound;
  std::string out;
};

int cmd_synth(const SynthOptions& o, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto key = parse_eval_key(o.eval);
  if (key.size() > kMaxKeyLength) throw Error(ErrorKind::invalid_argument, "evaluation key has too many functions");
  Problem p = load_problem(o.common.domain, o.common.pointers, InstanceSet::synthesis, o.common.count, o.common.seed);
  std::size_t lines = o.lines;
  if (lines == 0) {
    if (!p.builtin) throw Error(ErrorKind::invalid_argument, "--lines is required for a domain directory");
    lines = builtin_domain(o.common.domain).synthesis_lines;
  }
  if (lines < 1) throw Error(ErrorKind::invalid_argument, "--lines must be positive");
  ExtendedDomain ext(p.domain, p.pointers);

  SearchConfig cfg;
  cfg.lines = lines;
  cfg.key = key;
  cfg.execution.value_bound = o.bound;
  cfg.limits.timeout_seconds = o.timeout;
  if (o.max_nodes) cfg.limits.max_nodes = o.max_nodes;
  const SearchResult result = synthesize(ext, p.instances, cfg);

  json report;
  report["command"] = command_echo(args);
  report["config"] = {{"domain", p.source},
                      {"lines", lines},
                      {"pointers", pointers_json(p.domain, p.pointers)},
                      {"instructions", ext.instruction_count()},
                      {"eval", o.eval},
                      {"timeout", o.timeout},
                      {"max_nodes", cfg.limits.max_nodes},
                      {"bound", o.bound},
                      {"seed", o.common.seed},
                      {"instances", p.instances.size()},
                      {"isa", kernels::to_string(kernels::active_isa())}};
  report["stats"] = {{"expanded", result.stats.expanded},
                     {"generated", result.stats.generated},
                     {"evaluated", result.stats.generated + 1},
                     {"dead_ends", result.stats.dead_ends},
                     {"peak_open", result.stats.peak_open},
                     {"seconds", result.stats.seconds},
                     {"termination", to_string(result.stats.termination)},
                     {"peak_rss_kb", peak_rss_kb()}};
  int code = exit_ok;
  switch (result.stats.termination) {
    case Termination::solved: code = exit_ok; break;
    case Termination::exhausted: code = exit_space_exhausted; break;
    case Termination::time_limit:
    case Termination::node_limit: code = exit_limit_reached; break;
  }
  if (result.solution) {
    const std::string text = print_program(*result.solution, ext);
    report["solution"] = text;
    const auto machines = compile_instances(ext, p.instances);
    const bool partial = std::all_of(machines.begin(), machines.end(), [](const Machine& m) { return m.goal_is_partial_state(); });
    const auto perf = eval_performance(*result.solution, machines, cfg.execution, partial);
    const auto values = combine(eval_structural(*result.solution), perf, cfg.f9_weight);
    json ev;
    for (int f = 1; f <= 9; ++f) {
      auto fn = static_cast<EvalFunction>(f);
      if (!partial && (fn == EvalFunction::f5 || fn == EvalFunction::f8 || fn == EvalFunction::f9)) continue;
      ev[to_string(fn)] = values[fn];
    }
    report["evaluation"] = ev;
    json per = json::array();
    for (std::size_t k = 0; k < perf.outcomes.size(); ++k)
      per.push_back({{"name", p.instances[k].name},
                     {"outcome", to_string(perf.outcomes[k].kind)},
                     {"steps", perf.outcomes[k].steps},
                     {"plan_length", perf.outcomes[k].plan_length}});
    report["instances"] = per;
    out << text;
    if (!o.out.empty()) write_file(o.out, text);
  } else {
    report["solution"] = nullptr;
    err << "no solution: " << to_string(result.stats.termination) << " after " << result.stats.expanded
        << " expansions\n";
  }
  report["exit_code"] = code;
  write_report(o.common.json_path, report);
  return code;
}

struct ValidateOptions {
  Common common;
  std::string program;
  bool corpus = false;
  std::string set = "validation";
  Value bound = kValidationBound;
  std::string detection = "on";
  std::uint64_t step_limit = 0;
};

int cmd_validate(const ValidateOptions& o, const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
  if (o.detection != "on" && o.detection != "off")
    throw Error(ErrorKind::invalid_argument, "--infinite-detection takes on or off");
  if (o.program.empty() == !o.corpus) throw Error(ErrorKind::invalid_argument, "give exactly one of --program or --corpus");
  const InstanceSet set = parse_instance_set(o.set);
  Problem p = load_problem(o.common.domain, o.common.pointers, set, o.common.count, o.common.seed);
  ExtendedDomain ext(p.domain, p.pointers);
  const Program program = o.corpus ? corpus_program(p.domain.name, ext) : parse_program(read_file(o.program), ext);

  ExecutionConfig cfg;
  cfg.value_bound = o.bound;
  cfg.infinite_detection = o.detection == "on";
  // Detection bounds every run by itself, so the step limit only applies when asked for.
  cfg.step_limit = o.step_limit ? o.step_limit
                                : (cfg.infinite_detection ? UINT64_MAX : env_or("BFGP_STEP_LIMIT", kDefaultStepLimit));

  json per = json::array();
  std::size_t solved = 0;
  int code = exit_ok;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& inst : p.instances) {
    const auto ti = std::chrono::steady_clock::now();
    const Machine machine(ext, inst);
    const ExecutionOutcome outcome = machine.run(program, cfg);
    const double secs = seconds_since(ti);
    const std::size_t state_bytes = (outcome.state.values.size() + outcome.state.pointers.size()) * sizeof(Value);
    per.push_back({{"name", inst.name},
                   {"outcome", to_string(outcome.kind)},
                   {"reason", to_string(outcome.reason)},
                   {"line", outcome.line},
                   {"steps", outcome.steps},
                   {"plan_length", outcome.plan_length},
                   {"seconds", secs},
                   {"state_bytes", state_bytes}});
    if (!outcome.solved()) {
      err << "instance " << inst.name << " not solved: " << to_string(outcome.kind);
      if (outcome.failed()) err << " (" << to_string(outcome.reason) << ")";
      err << " at line " << outcome.line << "\n";
      code = exit_validation_failed;
      break;
    }
    ++solved;
  }
  const double total = seconds_since(t0);
  out << "solved " << solved << "/" << p.instances.size() << " instances in " << total << " s\n";

  json report;
  report["command"] = command_echo(args);
  report["config"] = {{"domain", p.source},
                      {"program", o.corpus ? "corpus" : o.program},
                      {"pointers", pointers_json(p.domain, p.pointers)},
                      {"set", o.set},
                      {"bound", o.bound},
                      {"infinite_detection", cfg.infinite_detection},
                      {"step_limit", cfg.step_limit},
                      {"seed", o.common.seed},
                      {"instances", p.instances.size()},
                      {"isa", kernels::to_string(kernels::active_isa())}};
  report["validation"] = {{"solved", solved}, {"seconds", total}, {"peak_rss_kb", peak_rss_kb()}};
  report["instances"] = per;
  report["program"] = print_program(program, ext);
  report["exit_code"] = code;
  write_report(o.common.json_path, report);
  return code;
}

struct GenOptions {
  Common common;
  std::string set = "synthesis";
  std::string out;
};

int cmd_gen(const GenOptions& o, std::ostream& out) {
  if (o.common.domain.empty()) throw Error(ErrorKind::invalid_argument, "--domain is required");
  const InstanceSet set = parse_instance_set(o.set);
  Problem p = load_problem(o.common.domain, o.common.pointers, set, o.common.count, o.common.seed);
  if (!p.builtin) throw Error(ErrorKind::unknown_domain, "gen takes a builtin domain name");
  if (!o.out.empty()) {
    write_problem_dir(o.out, p.domain, p.pointers, p.instances);
    out << "wrote " << p.instances.size() << " instances to " << o.out << "\n";
    return exit_ok;
  }
  Domain d = p.domain;
  d.default_pointers.clear();
  for (const auto& ptr : p.pointers) d.default_pointers.push_back({ptr.name, ptr.type});
  out << print_domain(d);
  for (const auto& inst : p.instances) out << "\n" << print_instance(inst, d, p.pointers);
  return exit_ok;
}

struct TranslateOptions {
  std::string domain_file;
  std::vector<std::string> problem_files;
  std::string out;
  std::string pointers;
  std::string json_path;
};

int cmd_translate(const TranslateOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  if (o.domain_file.empty() || o.problem_files.empty())
    throw Error(ErrorKind::invalid_argument, "--pddl-domain and --pddl-problem are required");
  pddl::StripsModel model;
  model.domain = pddl::parse_domain(read_file(o.domain_file));
  for (const auto& f : o.problem_files) model.problems.push_back(pddl::parse_problem(read_file(f), model.domain));
  pddl::Translation tr = pddl::translate(model);
  if (!o.pointers.empty()) tr = pddl::translate(model, parse_pointer_declaration(o.pointers, tr.domain));
  if (!o.out.empty()) {
    write_problem_dir(o.out, tr.domain, tr.pointers, tr.instances);
    out << "wrote " << tr.instances.size() << " instances to " << o.out << "\n";
  } else {
    out << print_domain(tr.domain);
    for (const auto& inst : tr.instances) out << "\n" << print_instance(inst, tr.domain, tr.pointers);
  }
  json report;
  report["command"] = command_echo(args);
  report["domain"] = tr.domain.name;
  report["pointers"] = pointers_json(tr.domain, tr.pointers);
  json names = json::array();
  for (const auto& inst : tr.instances) names.push_back(inst.name);
  report["instances"] = names;
  report["exit_code"] = exit_ok;
  write_report(o.json_path, report);
  return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized planning as heuristic search over pointer-based planning programs", "bfgp"};
  app.require_subcommand(1);

  SynthOptions synth;
  ValidateOptions validate;
  GenOptions gen;
  TranslateOptions translate;

  try {
    synth.timeout = env_or("BFGP_TIMEOUT", kDefaultTimeout);
    synth.max_nodes = env_or<std::size_t>("BFGP_MAX_NODES", 0);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_input_error;
  }

  auto* s = app.add_subcommand("synth", "Search for a program that solves every instance");
  add_common(s, synth.common);
  s->add_option("--lines", synth.lines, "Program size n (defaults to the builtin domain's size)");
  s->add_option("--eval", synth.eval, "Evaluation key, e.g. f5,f7")->capture_default_str();
  s->add_option("--timeout", synth.timeout, "CPU budget in seconds (env BFGP_TIMEOUT)")->capture_default_str();
  s->add_option("--max-nodes", synth.max_nodes, "Open-list size limit (env BFGP_MAX_NODES)");
  s->add_option("--bound", synth.bound, "Value bound for state variables")->capture_default_str();
  s->add_option("--out", synth.out, "Write the program text to this file");

  auto* v = app.add_subcommand("validate", "Run a program on an instance set");
  add_common(v, validate.common);
  v->add_option("--program", validate.program, "Program file");
  v->add_flag("--corpus", validate.corpus, "Use the builtin reference program");
  v->add_option("--set", validate.set, "synthesis or validation")->capture_default_str();
  v->add_option("--bound", validate.bound, "Value bound for state variables")->capture_default_str();
  v->add_option("--infinite-detection", validate.detection, "on or off")->capture_default_str();
  v->add_option("--step-limit", validate.step_limit, "Execution step limit per instance (env BFGP_STEP_LIMIT)");

  auto* g = app.add_subcommand("gen", "Write a builtin domain and generated instances");
  add_common(g, gen.common);
  g->add_option("--set", gen.set, "synthesis or validation")->capture_default_str();
  g->add_option("--out", gen.out, "Output directory (stdout if omitted)");

  auto* t = app.add_subcommand("translate", "Translate STRIPS PDDL into the pointer-based format");
  t->add_option("--pddl-domain", translate.domain_file, "PDDL domain file");
  t->add_option("--pddl-problem", translate.problem_files, "PDDL problem files")->expected(1, -1);
  t->add_option("--out", translate.out, "Output directory (stdout if omitted)");
  t->add_option("--pointers", translate.pointers, "Explicit pointer declaration");
  t->add_option("--json", translate.json_path, "Write a JSON report to this file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return exit_input_error;
  }

  try {
    if (s->parsed()) return cmd_synth(synth, args, out, err);
    if (v->parsed()) return cmd_validate(validate, args, out, err);
    if (g->parsed()) return cmd_gen(gen, out);
    if (t->parsed()) return cmd_translate(translate, args, out);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_input_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_input_error;
  }
  return exit_input_error;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace bfgp::cli
