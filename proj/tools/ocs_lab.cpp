// ocs-lab: experiment runner for the online-correlated-selection library.
//
//   ocs-lab verify-semi     --seed 1 --trials 1000000
//   ocs-lab verify-multiway --seed 1
//   ocs-lab verify-ocs      --seed 1 --p 0.6616 --beta 0.4142
//   ocs-lab lp --bound semi|flag|gamma:0.5|multiway|exp
//   ocs-lab match --alg greedy|balance|edge-flag|edge-ocs [--instance FILE]
//   ocs-lab gen --family tournament|hardness|counterexample|upper-triangular|random-*
//
// Exit code 0 iff every report row passes.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ocs/automata.hpp"
#include "ocs/combined_ocs.hpp"
#include "ocs/harness.hpp"
#include "ocs/instances.hpp"
#include "ocs/multiway.hpp"

namespace {

struct CommonArgs {
    ocs::harness::Options opt;
    std::string out_path;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--seed", args.opt.seed, "master seed");
    cmd->add_option("--trials", args.opt.trials, "Monte Carlo trials per case (0 = default)");
    cmd->add_option("--workers", args.opt.workers, "worker threads (0 = hardware)");
    cmd->add_option("--scale", args.opt.scale, "corpus scale factor");
    cmd->add_option("--out", args.out_path, "write the report here instead of stdout");
    cmd->add_option("--format", args.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

int emit(const ocs::Report& report, const CommonArgs& args) {
    std::ostringstream body;
    if (args.format == "json")
        ocs::write_json(body, report);
    else
        ocs::write_csv(body, report);
    if (args.out_path.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream out(args.out_path);
        if (!out) {
            std::cerr << "cannot open " << args.out_path << "\n";
            return 2;
        }
        out << body.str();
    }
    return report.all_pass() ? 0 : 1;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"online correlated selection lab"};
    app.require_subcommand(1);

    CommonArgs args;
    int arg_k = 4, arg_i = 2, arg_n = 8;
    std::string bound_name = "semi";
    std::string algorithm = "greedy";
    std::string family = "tournament";
    std::string instance_path;
    std::size_t random_count = 50;

    auto* semi = app.add_subcommand("verify-semi", "semi-OCS bound and tightness suite");
    add_common(semi, args);
    semi->add_option("--k", arg_k, "largest tournament stage count");

    auto* multi = app.add_subcommand("verify-multiway", "multi-way semi-OCS suite");
    add_common(multi, args);
    multi->add_option("--c", args.opt.c, "cubic coefficient (0 = built-in default)");

    auto* vocs = app.add_subcommand("verify-ocs", "automata OCS + flag OCS suite");
    add_common(vocs, args);
    vocs->add_option("--p", args.opt.p, "forest constructor parameter");
    vocs->add_option("--beta", args.opt.beta, "forest OCS margin");

    auto* lp = app.add_subcommand("lp", "LP closed forms and feasibility");
    add_common(lp, args);
    lp->add_option("--bound", bound_name, "semi | flag | gamma:<g> | multiway | exp");
    lp->add_option("--c", args.opt.c, "cubic coefficient (0 = built-in default)");

    auto* match = app.add_subcommand("match", "matching ratio experiments");
    add_common(match, args);
    match->add_option("--alg", algorithm, "greedy | balance | edge-flag | edge-ocs");
    match->add_option("--instance", instance_path, "matching instance JSON (default corpus if absent)");
    match->add_option("--random-count", random_count, "random instances in the default corpus");
    match->add_option("--p", args.opt.p, "forest constructor parameter (edge-ocs)");
    match->add_option("--beta", args.opt.beta, "forest OCS margin (edge-ocs)");
    match->add_option("--c", args.opt.c, "cubic coefficient (balance)");

    auto* trace = app.add_subcommand("trace", "run the automata OCS once and dump per-round JSONL");
    trace->add_option("--instance", instance_path, "two-way instance JSON")->required();
    trace->add_option("--seed", args.opt.seed, "run seed");
    trace->add_option("--p", args.opt.p, "forest constructor parameter");
    trace->add_option("--beta", args.opt.beta, "forest OCS margin");
    trace->add_option("--out", args.out_path, "output file (stdout if absent)");

    auto* gen = app.add_subcommand("gen", "emit an instance as JSON");
    gen->add_option("--family", family,
                    "tournament | hardness | counterexample | upper-triangular | "
                    "random-two-way | random-multi-way | random-matching");
    gen->add_option("--k", arg_k, "tournament stages");
    gen->add_option("--i", arg_i, "hardness parameter");
    gen->add_option("--n", arg_n, "upper-triangular size");
    gen->add_option("--seed", args.opt.seed, "generator seed");
    gen->add_option("--out", args.out_path, "output file (stdout if absent)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (semi->parsed()) return emit(ocs::harness::verify_semi(args.opt, arg_k), args);
        if (multi->parsed()) return emit(ocs::harness::verify_multiway(args.opt), args);
        if (vocs->parsed()) return emit(ocs::harness::verify_ocs(args.opt), args);
        if (lp->parsed()) {
            ocs::Report report = ocs::harness::lp_suite(args.opt, bound_name, &std::cout);
            return emit(report, args);
        }
        if (match->parsed()) {
            std::vector<ocs::harness::MatchJob> jobs;
            if (instance_path.empty()) {
                jobs = ocs::harness::default_match_jobs(algorithm, random_count, args.opt.seed);
            } else {
                jobs.push_back({instance_path, ocs::matching_from_json(read_file(instance_path))});
            }
            return emit(ocs::harness::match_suite(args.opt, algorithm, jobs), args);
        }
        if (trace->parsed()) {
            auto inst = ocs::two_way_from_json(read_file(instance_path));
            ocs::CombinedOcs sel(ocs::OcsParams{args.opt.p, args.opt.beta});
            ocs::Rng rng(args.opt.seed);
            ocs::run(sel, ocs::rounds_of(inst), rng);
            if (args.out_path.empty()) {
                std::cout << sel.debug_jsonl();
            } else {
                std::ofstream out(args.out_path);
                out << sel.debug_jsonl();
            }
            return 0;
        }
        if (gen->parsed()) {
            std::string text;
            ocs::Rng rng(args.opt.seed);
            if (family == "tournament")
                text = ocs::to_json(ocs::gen_tournament(arg_k, args.opt.seed).instance);
            else if (family == "hardness")
                text = ocs::to_json(ocs::gen_ocs_hardness(arg_i));
            else if (family == "counterexample")
                text = ocs::to_json(ocs::gen_positive_correlation_counterexample());
            else if (family == "upper-triangular")
                text = ocs::to_json(ocs::gen_upper_triangular(arg_n));
            else if (family == "random-two-way")
                text = ocs::to_json(ocs::harness::random_two_way(rng, 10, 6));
            else if (family == "random-multi-way")
                text = ocs::to_json(ocs::harness::random_multi_way(rng, 8, 6));
            else if (family == "random-matching")
                text = ocs::to_json(ocs::harness::random_matching(
                    rng, ocs::MatchingInstance::Kind::edge_weighted, 8, 10));
            else {
                std::cerr << "unknown family '" << family << "'\n";
                return 2;
            }
            if (args.out_path.empty()) {
                std::cout << text << "\n";
            } else {
                std::ofstream out(args.out_path);
                out << text << "\n";
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
