#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "otlab/io.hpp"
#include "otlab/potentials.hpp"
#include "otlab/rigidity.hpp"
#include "otlab/scenarios.hpp"

namespace {

using otlab::json;

void emit(const json& j, const std::string& out_path) {
    std::string text = otlab::emit_json(j);
    if (out_path.empty())
        std::cout << text;
    else
        otlab::write_text_file(out_path, text);
}

void emit_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        otlab::write_text_file(out_path, text);
}

struct CommonArgs {
    std::string mu_path, nu_path, eta_path;
    std::string norm_arg = "{\"kind\":\"euclidean\"}";
    std::string subspace_arg;
    double p = 2.0;
    double tol = 1e-8;
    uint64_t seed = 0;
    std::string out_path;
    std::string format = "json";
};

otlab::DiscreteMeasure load_measure(const std::string& path) {
    return otlab::measure_from_json(otlab::load_json_file(path));
}

int run(int argc, char** argv) {
    CLI::App app{"discrete optimal-transport laboratory over normed R^n"};
    app.require_subcommand(1);
    CommonArgs a;

    auto add_norm_p = [&](CLI::App* cmd) {
        cmd->add_option("--norm", a.norm_arg, "norm spec, inline JSON or @file");
        cmd->add_option("--p", a.p, "Wasserstein exponent p >= 1");
        cmd->add_option("--seed", a.seed, "RNG seed (echoed in output)");
        cmd->add_option("--out", a.out_path, "write output to this path");
        cmd->add_option("--format", a.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    CLI::App* distance = app.add_subcommand("distance", "exact W_p distance between two measures");
    distance->add_option("--mu", a.mu_path, "measure JSON file")->required();
    distance->add_option("--nu", a.nu_path, "measure JSON file")->required();
    add_norm_p(distance);

    CLI::App* plan = app.add_subcommand("plan", "optimal plan as CSV (i, j, mass, cost_ij)");
    plan->add_option("--mu", a.mu_path)->required();
    plan->add_option("--nu", a.nu_path)->required();
    add_norm_p(plan);

    CLI::App* align = app.add_subcommand("align", "triangle-equality check for three measures");
    align->add_option("--mu", a.mu_path)->required();
    align->add_option("--nu", a.nu_path)->required();
    align->add_option("--eta", a.eta_path)->required();
    align->add_option("--tol", a.tol, "alignment tolerance");
    add_norm_p(align);

    CLI::App* project = app.add_subcommand("project", "norm projection of a measure onto a subspace");
    project->add_option("--mu", a.mu_path)->required();
    project->add_option("--subspace", a.subspace_arg, "subspace JSON, inline or @file")->required();
    add_norm_p(project);

    std::string point_arg, direction_arg = "[1,0]";
    double grid_min = -3.0, grid_max = 3.0, grid_step = 0.1;
    bool use_grid = false;
    CLI::App* potential = app.add_subcommand("potential", "potential d_Wp^p(mu, delta_x)");
    potential->add_option("--mu", a.mu_path)->required();
    potential->add_option("--point", point_arg, "evaluation point as JSON array");
    potential->add_flag("--grid", use_grid, "scan a square 2-d grid, CSV output");
    potential->add_option("--grid-min", grid_min);
    potential->add_option("--grid-max", grid_max);
    potential->add_option("--grid-step", grid_step);
    add_norm_p(potential);

    double h0 = 0.5, shrink = 0.5;
    int steps = 20;
    CLI::App* atoms = app.add_subcommand("atoms", "atom-mass recovery via second differences (p < 2)");
    atoms->add_option("--mu", a.mu_path)->required();
    atoms->add_option("--point", point_arg, "location as JSON array")->required();
    atoms->add_option("--direction", direction_arg, "step direction as JSON array");
    atoms->add_option("--h0", h0, "initial step");
    atoms->add_option("--shrink", shrink, "geometric shrink factor in (0,1)");
    atoms->add_option("--steps", steps, "number of steps");
    add_norm_p(atoms);

    int dim = 3, grid = 64;
    CLI::App* kernel = app.add_subcommand(
        "kernel-search", "search for a nonnegative non-constant Hessian pairing with a kernel");
    kernel->add_option("--dim", dim, "ambient dimension");
    kernel->add_option("--grid", grid, "sample count on the norm sphere (>= 16)");
    add_norm_p(kernel);

    std::string candidate_arg, probes_arg;
    CLI::App* certify = app.add_subcommand("certify", "isometry certificate over a probe list");
    certify->add_option("--candidate", candidate_arg, "candidate JSON, inline or @file")->required();
    certify->add_option("--probes", probes_arg, "probe pairs JSON, inline or @file")->required();
    certify->add_option("--tol", a.tol, "preservation tolerance");
    add_norm_p(certify);

    std::string scenario_id = "all";
    CLI::App* scenario = app.add_subcommand("scenario", "run one replication scenario or the corpus");
    scenario->add_option("--id", scenario_id, "scenario id or 'all'");
    add_norm_p(scenario);

    CLI::App* list = app.add_subcommand("list-scenarios", "list scenario ids");
    list->add_option("--out", a.out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    otlab::NormSpec spec = otlab::norm_from_json(otlab::parse_json_arg(a.norm_arg));

    if (distance->parsed()) {
        otlab::OTResult r = otlab::solve(load_measure(a.mu_path), load_measure(a.nu_path), spec, a.p);
        emit(json{{"distance", r.distance},
                  {"cost_p", r.cost_p},
                  {"iterations", r.stats.iterations},
                  {"status", r.stats.status},
                  {"p", a.p},
                  {"norm", otlab::norm_to_json(spec)},
                  {"seed", a.seed}},
             a.out_path);
        return 0;
    }

    if (plan->parsed()) {
        otlab::DiscreteMeasure mu = load_measure(a.mu_path);
        otlab::DiscreteMeasure nu = load_measure(a.nu_path);
        otlab::OTResult r = otlab::solve(mu, nu, spec, a.p);
        otlab::Mat c = otlab::cost_matrix(mu, nu, spec, a.p);
        std::ostringstream csv;
        csv << "i,j,mass,cost_ij\n";
        for (int i = 0; i < r.plan.mass.rows(); ++i)
            for (int j = 0; j < r.plan.mass.cols(); ++j)
                if (r.plan.mass(i, j) > 0.0)
                    csv << i << ',' << j << ',' << otlab::format_double(r.plan.mass(i, j))
                        << ',' << otlab::format_double(c(i, j)) << '\n';
        emit_text(csv.str(), a.out_path);
        return 0;
    }

    if (align->parsed()) {
        otlab::AlignmentReport r =
            otlab::alignment_check(load_measure(a.mu_path), load_measure(a.nu_path),
                                   load_measure(a.eta_path), spec, a.p, a.tol);
        emit(json{{"d_mu_nu", r.d_mu_nu},
                  {"d_nu_eta", r.d_nu_eta},
                  {"d_mu_eta", r.d_mu_eta},
                  {"defect", r.defect},
                  {"aligned", r.aligned},
                  {"tol", a.tol},
                  {"p", a.p},
                  {"norm", otlab::norm_to_json(spec)},
                  {"seed", a.seed}},
             a.out_path);
        return 0;
    }

    if (project->parsed()) {
        otlab::AffineSubspace sub =
            otlab::subspace_from_json(otlab::parse_json_arg(a.subspace_arg));
        otlab::DiscreteMeasure hat =
            otlab::project_measure(load_measure(a.mu_path), sub, spec, a.p);
        emit(json{{"projected", otlab::measure_to_json(hat)},
                  {"p", a.p},
                  {"norm", otlab::norm_to_json(spec)},
                  {"seed", a.seed}},
             a.out_path);
        return 0;
    }

    if (potential->parsed()) {
        otlab::DiscreteMeasure mu = load_measure(a.mu_path);
        if (use_grid) {
            if (mu.dim != 2) throw otlab::DomainError("potential --grid requires dimension 2");
            std::ostringstream csv;
            csv << "x1,x2,value\n";
            for (double x = grid_min; x <= grid_max + 1e-12; x += grid_step)
                for (double y = grid_min; y <= grid_max + 1e-12; y += grid_step)
                    csv << otlab::format_double(x) << ',' << otlab::format_double(y) << ','
                        << otlab::format_double(otlab::potential_eval(mu, spec, a.p, {x, y}))
                        << '\n';
            emit_text(csv.str(), a.out_path);
            return 0;
        }
        if (point_arg.empty()) throw otlab::UsageError("potential needs --point or --grid");
        otlab::Vec x = otlab::vec_from_json(otlab::parse_json_arg(point_arg));
        emit(json{{"value", otlab::potential_eval(mu, spec, a.p, x)},
                  {"point", otlab::vec_to_json(x)},
                  {"p", a.p},
                  {"norm", otlab::norm_to_json(spec)},
                  {"seed", a.seed}},
             a.out_path);
        return 0;
    }

    if (atoms->parsed()) {
        otlab::DiscreteMeasure mu = load_measure(a.mu_path);
        otlab::Vec x = otlab::vec_from_json(otlab::parse_json_arg(point_arg));
        otlab::Vec dirv = otlab::vec_from_json(otlab::parse_json_arg(direction_arg));
        otlab::AtomEstimate est =
            otlab::atom_estimate(mu, spec, a.p, x, dirv, h0, shrink, steps);
        json hs = json::array();
        for (auto [h, g] : est.h_sequence) hs.push_back(json{{"h", h}, {"G", g}});
        emit(json{{"location", otlab::vec_to_json(est.location)},
                  {"estimate", est.estimate},
                  {"converged", est.converged},
                  {"h_sequence", hs},
                  {"p", a.p},
                  {"norm", otlab::norm_to_json(spec)},
                  {"seed", a.seed}},
             a.out_path);
        return 0;
    }

    if (kernel->parsed()) {
        otlab::DirectionSearchResult r = otlab::direction_search(spec, a.p, dim, grid, a.seed);
        json j{{"found", r.found},
               {"p", a.p},
               {"norm", otlab::norm_to_json(spec)},
               {"dim", dim},
               {"grid", grid},
               {"seed", a.seed}};
        if (r.found) {
            j["v1"] = otlab::vec_to_json(r.v1);
            j["v2"] = otlab::vec_to_json(r.v2);
            j["min_value"] = r.min_value;
            j["max_value"] = r.max_value;
            j["nonconstant"] = r.nonconstant;
        }
        emit(j, a.out_path);
        return 0;
    }

    if (certify->parsed()) {
        otlab::IsometryCandidate cand =
            otlab::candidate_from_json(otlab::parse_json_arg(candidate_arg));
        json pj = otlab::parse_json_arg(probes_arg);
        std::vector<std::pair<otlab::DiscreteMeasure, otlab::DiscreteMeasure>> probes;
        for (const auto& pr : pj)
            probes.emplace_back(otlab::measure_from_json(pr.at("mu")),
                                otlab::measure_from_json(pr.at("nu")));
        otlab::Certificate cert = otlab::isometry_certificate(cand, probes, spec, a.p, a.tol);
        emit(json{{"candidate", cand.name()},
                  {"preserved", cert.preserved},
                  {"probe", cert.witness},
                  {"probe_count", probes.size()},
                  {"scope", "finite probe set; a violation is conclusive, preservation is not"},
                  {"lhs", cert.lhs},
                  {"rhs", cert.rhs},
                  {"violation", cert.max_violation},
                  {"tol", a.tol},
                  {"p", a.p},
                  {"norm", otlab::norm_to_json(spec)},
                  {"seed", a.seed}},
             a.out_path);
        return 0;
    }

    if (scenario->parsed()) {
        std::vector<std::string> ids =
            scenario_id == "all" ? otlab::scenario_ids() : std::vector<std::string>{scenario_id};
        json results = json::array();
        bool all_pass = true;
        size_t width = 0;
        for (const std::string& id : ids) width = std::max(width, id.size());
        std::ostringstream table;
        for (const std::string& id : ids) {
            otlab::ScenarioResult r = otlab::run_scenario(id, a.seed);
            results.push_back(otlab::scenario_to_json(r));
            all_pass = all_pass && r.pass;
            table << id << std::string(width + 2 - id.size(), ' ')
                  << (r.pass ? "PASS" : "FAIL") << '\n';
        }
        if (a.format == "json" && !a.out_path.empty()) {
            otlab::write_text_file(a.out_path, otlab::emit_json(results));
            std::cout << table.str();
        } else if (a.format == "json" && ids.size() == 1 && scenario_id != "all") {
            std::cout << otlab::emit_json(results[0]);
        } else {
            std::cout << table.str();
        }
        return all_pass ? 0 : 1;
    }

    if (list->parsed()) {
        std::ostringstream out;
        for (const std::string& id : otlab::scenario_ids())
            out << id << "  " << otlab::scenario_reference(id) << '\n';
        emit_text(out.str(), a.out_path);
        return 0;
    }

    throw otlab::UsageError("no subcommand given");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const otlab::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const otlab::DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
