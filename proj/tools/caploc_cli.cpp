// caploc: command-line front end for the capacitated facility location library.
//
// Exit codes: 0 success, 1 expected failure (--expect-pass with a
// counterexample, failed scenario), 2 usage, parse or input errors.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "caploc/axioms.hpp"
#include "caploc/experiments.hpp"
#include "caploc/optimal.hpp"
#include "json.hpp"

using namespace caploc;

namespace {

constexpr int kExitExpectedFailure = 1;
constexpr int kExitUsage = 2;

struct InstanceSource {
  std::string path;
  std::string agents;
  std::string capacities;
};

void add_instance_flags(CLI::App* cmd, InstanceSource& src) {
  cmd->add_option("--instance", src.path, "instance document (agents, capacities)");
  cmd->add_option("--agents", src.agents, "inline agent locations, e.g. 0,1/2,1");
  cmd->add_option("--capacities", src.capacities, "inline capacities, e.g. 2,2");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read instance file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Instance load_instance(const InstanceSource& src) {
  const bool inline_given = !src.agents.empty() || !src.capacities.empty();
  if (inline_given) {
    if (src.agents.empty() || src.capacities.empty()) throw ParseError("--agents and --capacities go together");
    if (!src.path.empty()) std::cerr << "warning: inline --agents/--capacities override --instance " << src.path << '\n';
    return Instance(parse_rational_list(src.agents), parse_int_list(src.capacities));
  }
  if (src.path.empty()) throw ParseError("no instance given (use --instance or --agents/--capacities)");
  return parse_instance(read_file(src.path));
}

std::string facility_numbers(const Instance& inst, const Solution& sol) {
  std::string out = "(";
  for (AgentId id = 0; id < inst.num_agents(); ++id)
    out += (id ? "," : "") + std::to_string(sol.assignment[inst.position_of(id)] + 1);
  return out + ")";
}

nlohmann::ordered_json solution_doc(const Instance& inst, const Solution& sol) {
  nlohmann::ordered_json doc;
  doc["locations"] = nlohmann::ordered_json::array();
  for (const auto& y : sol.locations) doc["locations"].push_back(y.to_string());
  doc["assignment"] = nlohmann::ordered_json::array();
  for (AgentId id = 0; id < inst.num_agents(); ++id) doc["assignment"].push_back(sol.assignment[inst.position_of(id)] + 1);
  doc["total"] = total_distance(inst, sol).to_string();
  doc["max"] = max_distance(inst, sol).to_string();
  return doc;
}

void print_solution(std::ostream& os, const Instance& inst, const Solution& sol, ReportFormat format) {
  if (format == ReportFormat::Structured) {
    os << solution_doc(inst, sol).dump(2) << '\n';
    return;
  }
  if (format == ReportFormat::Csv) {
    os << "agent,location,facility,facility_location,distance\n";
    for (AgentId id = 0; id < inst.num_agents(); ++id) {
      const auto pos = inst.position_of(id);
      os << id + 1 << ',' << inst.location(pos).to_string() << ',' << sol.assignment[pos] + 1 << ','
         << sol.serving_location(pos).to_string() << ',' << agent_distance(inst, sol, pos).to_string() << '\n';
    }
    return;
  }
  os << "y=" << format_rationals(sol.locations) << '\n';
  os << "assignment=" << facility_numbers(inst, sol) << '\n';
  os << "total " << total_distance(inst, sol) << '\n';
  os << "max " << max_distance(inst, sol) << '\n';
}

std::vector<Objective> objectives_from(const std::string& text) {
  if (text == "both") return {Objective::Total, Objective::Max};
  return {parse_objective(text)};
}

std::string file_safe(std::string id) {
  for (char& ch : id)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_' && ch != '.') ch = '_';
  return id;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strategy-proof capacitated facility location on the line"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "caploc 0.1.0");

  std::uint64_t seed = 1;
  std::string format_text = "text";
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "random seed")->capture_default_str();
    cmd->add_option("--format", format_text, "text, csv or structured")
        ->check(CLI::IsMember({"text", "csv", "structured"}))
        ->capture_default_str();
  };

  // gen
  GeneratorSpec gen_spec;
  std::string gen_caps;
  std::string gen_out_dir;
  auto* gen = app.add_subcommand("gen", "generate instances");
  gen->add_option("--family", gen_spec.family, "generator family")->check(CLI::IsMember(generator_families()))->capture_default_str();
  gen->add_option("-n,--n", gen_spec.n, "agents")->capture_default_str();
  gen->add_option("-k,--k", gen_spec.k, "family parameter k")->capture_default_str();
  gen->add_option("-c,--c", gen_spec.c, "facility capacity for thm6-spare")->capture_default_str();
  gen->add_option("--capacities", gen_caps, "capacities for uniform and clustered, e.g. 2,2");
  gen->add_option("--count", gen_spec.count, "instances to draw")->capture_default_str();
  gen->add_option("--resolution", gen_spec.resolution, "locations are multiples of 1/resolution")->capture_default_str();
  gen->add_option("--out-dir", gen_out_dir, "write one instance document per file into this directory");
  add_common(gen);

  // run
  InstanceSource run_src;
  std::string run_mech;
  auto* run = app.add_subcommand("run", "run a mechanism on an instance");
  run->add_option("--mech", run_mech, "mechanism canonical string")->required();
  add_instance_flags(run, run_src);
  add_common(run);

  // opt
  InstanceSource opt_src;
  std::string opt_objective = "total";
  bool opt_brute = false;
  auto* opt = app.add_subcommand("opt", "exact optimal welfare");
  add_instance_flags(opt, opt_src);
  opt->add_option("--objective", opt_objective, "total or max")->capture_default_str();
  opt->add_flag("--bruteforce", opt_brute, "enumerate all assignments (n <= 8)");
  add_common(opt);

  // audit
  InstanceSource audit_src;
  std::string audit_mech;
  std::string audit_axiom;
  std::string grid_resolution = DeviationGrid::default_resolution().to_string();
  bool expect_pass = false;
  bool sampled = false;
  std::size_t samples = 200;
  auto* audit = app.add_subcommand("audit", "check an axiom for a mechanism on an instance");
  audit->add_option("--mech", audit_mech, "mechanism canonical string")->required();
  audit->add_option("--axiom", audit_axiom, "anonymity, pareto, sp or group-sp")->required();
  add_instance_flags(audit, audit_src);
  audit->add_option("--grid-resolution", grid_resolution, "deviation grid step relative to the agent range")->capture_default_str();
  audit->add_flag("--sampled", sampled, "sample permutations instead of enumerating them");
  audit->add_option("--samples", samples, "permutations to sample")->capture_default_str();
  audit->add_flag("--expect-pass", expect_pass, "exit 1 when a counterexample is found");
  add_common(audit);

  // ratio
  InstanceSource ratio_src;
  std::vector<std::string> ratio_mechs;
  std::string ratio_objective = "both";
  GeneratorSpec ratio_spec;
  std::string ratio_caps;
  std::string ratio_sizes;
  bool ratio_decimal = false;
  std::string ratio_out;
  auto* ratio = app.add_subcommand("ratio", "welfare ratios against the exact optimum");
  ratio->add_option("--mech", ratio_mechs, "mechanism canonical string (repeatable)")->required();
  add_instance_flags(ratio, ratio_src);
  ratio->add_option("--objective", ratio_objective, "total, max or both")->capture_default_str();
  ratio->add_option("--family", ratio_spec.family, "sweep over a generator family")->check(CLI::IsMember(generator_families()));
  ratio->add_option("--sizes", ratio_sizes, "sweep sizes (k for ratio-total-k and thm7-family, else n), e.g. 2,3,4");
  ratio->add_option("-n,--n", ratio_spec.n, "agents when sizes are k")->capture_default_str();
  ratio->add_option("-k,--k", ratio_spec.k, "family parameter k")->capture_default_str();
  ratio->add_option("-c,--c", ratio_spec.c, "facility capacity for thm6-spare")->capture_default_str();
  ratio->add_option("--family-capacities", ratio_caps, "capacities for uniform and clustered");
  ratio->add_option("--count", ratio_spec.count, "instances per size")->capture_default_str();
  ratio->add_option("--resolution", ratio_spec.resolution, "locations are multiples of 1/resolution")->capture_default_str();
  ratio->add_flag("--decimal", ratio_decimal, "add a ratio_decimal column");
  ratio->add_option("--out", ratio_out, "write the report to this file instead of stdout");
  add_common(ratio);

  // scenario
  std::string scenario_name;
  bool scenario_list = false;
  auto* scenario = app.add_subcommand("scenario", "run a registered scenario");
  scenario->add_option("name", scenario_name, "scenario name");
  scenario->add_flag("--list", scenario_list, "list registered scenarios");
  add_common(scenario);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const ReportFormat format = parse_report_format(format_text);
    std::ostream& out = std::cout;

    if (gen->parsed()) {
      if (!gen_caps.empty()) gen_spec.capacities = parse_int_list(gen_caps);
      const auto instances = gen_instances(gen_spec, seed);
      if (format == ReportFormat::Csv) out << "id,agents,capacities\n";
      for (const auto& [id, inst] : instances) {
        if (!gen_out_dir.empty()) {
          write_document(gen_out_dir + "/" + file_safe(id) + ".json", serialize_instance(inst) + "\n");
          continue;
        }
        switch (format) {
          case ReportFormat::Text: out << id << "  " << describe(inst) << '\n'; break;
          case ReportFormat::Csv: {
            std::string caps;
            for (std::size_t j = 0; j < inst.num_facilities(); ++j) caps += (j ? " " : "") + std::to_string(inst.capacity(j));
            std::string agents;
            for (const auto& r : inst.reports_by_id()) agents += (agents.empty() ? "" : " ") + r.to_string();
            out << id << ',' << agents << ',' << caps << '\n';
            break;
          }
          case ReportFormat::Structured: {
            auto doc = nlohmann::ordered_json::parse(serialize_instance(inst));
            nlohmann::ordered_json line{{"id", id}};
            line["agents"] = doc["agents"];
            line["capacities"] = doc["capacities"];
            out << line.dump() << '\n';
            break;
          }
        }
      }
      return 0;
    }

    if (run->parsed()) {
      const auto mech = parse_mechanism(run_mech);
      const Instance inst = load_instance(run_src);
      const Solution sol = run_mechanism(mech, inst);
      if (format == ReportFormat::Text) out << "mechanism " << to_string(mech) << "\ninstance " << describe(inst) << '\n';
      print_solution(out, inst, sol, format);
      return 0;
    }

    if (opt->parsed()) {
      const Objective obj = parse_objective(opt_objective);
      const Instance inst = load_instance(opt_src);
      const OptResult result = opt_brute ? opt_bruteforce(inst, obj) : opt_dp(inst, obj);
      if (format == ReportFormat::Structured) {
        auto doc = solution_doc(inst, result.witness);
        doc["objective"] = std::string(to_string(obj));
        doc["value"] = result.value.to_string();
        out << doc.dump(2) << '\n';
      } else {
        if (format == ReportFormat::Text)
          out << "instance " << describe(inst) << "\nopt " << to_string(obj) << ' ' << result.value << '\n';
        print_solution(out, inst, result.witness, format);
      }
      return 0;
    }

    if (audit->parsed()) {
      const auto mech = parse_mechanism(audit_mech);
      const Axiom axiom = parse_axiom(audit_axiom);
      const Rational resolution = Rational::parse(grid_resolution);
      if (resolution <= Rational(0)) throw ParseError("--grid-resolution must be positive");
      const Instance inst = load_instance(audit_src);
      AxiomReport report = [&] {
        switch (axiom) {
          case Axiom::Anonymity: return check_anonymity(mech, inst, AnonymityMode{!sampled, seed, samples});
          case Axiom::ParetoOptimality: return check_pareto(mech, inst);
          case Axiom::StrategyProofness: return find_sp_violation(mech, inst, resolution);
          case Axiom::PartialGroupStrategyProofness: return check_partial_group_sp(mech, inst, resolution);
        }
        throw std::logic_error("unhandled axiom");
      }();
      if (format == ReportFormat::Structured) {
        out << nlohmann::json::parse(to_json(report)).dump(2) << '\n';
      } else if (format == ReportFormat::Csv) {
        out << "mechanism,axiom,verdict,explored\n"
            << report.mechanism << ',' << to_string(report.axiom) << ',' << to_string(report.verdict) << ','
            << report.explored << '\n';
      } else {
        out << "mechanism " << report.mechanism << '\n'
            << "y=" << format_rationals(report.solution.locations) << " assignment="
            << facility_numbers(inst, report.solution) << '\n'
            << describe(report) << '\n'
            << "explored " << report.explored << '\n';
      }
      return expect_pass && !report.holds() ? kExitExpectedFailure : 0;
    }

    if (ratio->parsed()) {
      const auto objectives = objectives_from(ratio_objective);
      std::vector<MechanismId> mechs;
      for (const auto& m : ratio_mechs) mechs.push_back(parse_mechanism(m));
      std::vector<RatioRecord> records;
      const bool sweep = !ratio_sizes.empty() || ratio->count("--family") > 0;
      if (sweep) {
        if (!ratio_caps.empty()) ratio_spec.capacities = parse_int_list(ratio_caps);
        std::vector<int> sizes = ratio_sizes.empty() ? std::vector<int>{} : parse_int_list(ratio_sizes);
        if (sizes.empty()) {
          const bool size_is_k = ratio_spec.family == "ratio-total-k" || ratio_spec.family == "thm7-family";
          sizes.push_back(size_is_k ? ratio_spec.k : ratio_spec.n);
        }
        for (auto& s : run_ratio_sweep(mechs, ratio_spec, sizes, seed, objectives)) records.push_back(std::move(s.record));
      } else {
        const Instance inst = load_instance(ratio_src);
        for (const auto& mech : mechs)
          for (Objective obj : objectives) records.push_back(opt_welfare_ratio(inst, mech, obj));
      }
      const std::string doc = emit_report(records, format, ratio_decimal);
      if (ratio_out.empty())
        out << doc;
      else
        write_document(ratio_out, doc);
      return 0;
    }

    if (scenario->parsed()) {
      if (scenario_list || scenario_name.empty()) {
        for (const auto& s : scenario_registry()) out << s.name << "  " << s.claim << '\n';
        return scenario_list ? 0 : kExitUsage;
      }
      const AuditReport report = run_theorem_audit(scenario_name, seed);
      out << emit_audit(report, format);
      return report.pass ? 0 : kExitExpectedFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "caploc: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
