// Command-line front end: matching plus the experiment runners, with
// machine-readable output on stdout. Timing diagnostics go to stderr so that
// repeated invocations with identical flags produce byte-identical stdout.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oatm/experiments.hpp"

namespace {

using oatm::SpaceKind;
using oatm::SpaceSpec;

nlohmann::ordered_json transform_json(const oatm::Transform& f) {
    nlohmann::ordered_json j;
    if (const auto* t = std::get_if<oatm::Translation>(&f)) {
        j["kind"] = "translation";
        j["dx"] = t->dx;
        j["dy"] = t->dy;
    } else {
        const auto& a = std::get<oatm::Affine>(f);
        j["kind"] = "affine";
        j["a11"] = a.a11;
        j["a12"] = a.a12;
        j["a21"] = a.a21;
        j["a22"] = a.a22;
        j["tx"] = a.tx;
        j["ty"] = a.ty;
    }
    return j;
}

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t next = csv.find(',', pos);
        if (next == std::string::npos) next = csv.size();
        out.push_back(std::stod(csv.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

std::vector<std::int64_t> parse_ints(const std::string& csv) {
    std::vector<std::int64_t> out;
    for (double v : parse_doubles(csv)) out.push_back(static_cast<std::int64_t>(v));
    return out;
}

struct CommonFlags {
    int t_greylevels = 0;  // 0: derive from sigma or the 10-greylevel default
    double sigma_greylevels = -1.0;
    double p0 = 0.99;
    std::int64_t seed = 1;
    int d_hat = 9;
    double cell_factor = 2.5;
    bool photometric = false;
    std::int64_t k_max = 100000;
    int threads = 0;
    bool text = false;
};

void add_common(CLI::App* cmd, CommonFlags& fl) {
    cmd->add_option("--t", fl.t_greylevels, "inlier threshold, greylevels (0-255 scale)");
    cmd->add_option("--sigma", fl.sigma_greylevels, "noise std, greylevels");
    cmd->add_option("--p0", fl.p0, "target success probability");
    cmd->add_option("--seed", fl.seed, "random seed");
    cmd->add_option("--dhat", fl.d_hat, "sampled dimensions per hash round");
    cmd->add_option("--cell-factor", fl.cell_factor, "grid cell side as a multiple of t");
    cmd->add_flag("--photometric", fl.photometric, "brightness/contrast invariant matching");
    cmd->add_option("--kmax", fl.k_max, "round budget ceiling");
    cmd->add_option("--threads", fl.threads, "parallelism cap (0 = machine)");
    cmd->add_flag("--text", fl.text, "aligned-column text report instead of JSON");
}

void apply_common(oatm::MatchConfig& cfg, const CommonFlags& fl) {
    if (fl.t_greylevels > 0) cfg.t = fl.t_greylevels / 255.0;
    if (fl.sigma_greylevels >= 0.0) cfg.sigma = fl.sigma_greylevels / 255.0;
    cfg.p0 = fl.p0;
    cfg.seed = static_cast<std::uint64_t>(fl.seed);
    cfg.d_hat = fl.d_hat;
    cfg.cell_factor = fl.cell_factor;
    cfg.photometric_invariant = fl.photometric;
    cfg.k_max = fl.k_max;
    cfg.threads = fl.threads;
}

int run(int argc, char** argv) {
    CLI::App app{"occlusion-aware template matching"};
    app.require_subcommand(1);

    CommonFlags fl;

    auto* cmd_match = app.add_subcommand("match", "match a template into an image");
    std::string template_path, image_path, space_name = "translation";
    double scale_min = 2.0 / 3.0, scale_max = 1.5;
    double rot_min = -0.7853981633974483, rot_max = 0.7853981633974483;
    cmd_match->add_option("--template", template_path, "template PGM path")->required();
    cmd_match->add_option("--image", image_path, "image PGM path")->required();
    cmd_match->add_option("--space", space_name, "translation|affine");
    cmd_match->add_option("--scale-min", scale_min, "affine: min scale");
    cmd_match->add_option("--scale-max", scale_max, "affine: max scale");
    cmd_match->add_option("--rot-min", rot_min, "affine: min rotation, radians");
    cmd_match->add_option("--rot-max", rot_max, "affine: max rotation, radians");
    add_common(cmd_match, fl);

    auto* cmd_validate = app.add_subcommand("validate", "success-rate validation vs the bound");
    std::string alphas_csv = "0.5,0.75,1.0", ks_csv = "8,64,512", rates_csv = "0.4,0.6,0.8,1.0";
    std::string sides_csv = "128,256,512";
    int v_trials = 100, v_template_side = 50, v_image_side = 250;
    cmd_validate->add_option("--alphas", alphas_csv, "inlier rates, comma separated");
    cmd_validate->add_option("--ks", ks_csv, "iteration counts, comma separated");
    cmd_validate->add_option("--trials", v_trials, "trials per cell");
    cmd_validate->add_option("--template-side", v_template_side, "planted template side");
    cmd_validate->add_option("--image-side", v_image_side, "image side");
    add_common(cmd_validate, fl);

    auto* cmd_scal = app.add_subcommand("scalability", "runtime growth vs sqrt(N)");
    int s_trials = 5, s_template_side = 32;
    cmd_scal->add_option("--sides", sides_csv, "image sides, comma separated");
    cmd_scal->add_option("--trials", s_trials, "trials per side");
    cmd_scal->add_option("--template-side", s_template_side, "template side");
    add_common(cmd_scal, fl);

    auto* cmd_occ = app.add_subcommand("occlusion", "center error vs inlier rate");
    int o_trials = 50, o_template_side = 32, o_image_side = 320;
    cmd_occ->add_option("--rates", rates_csv, "inlier rates, comma separated");
    cmd_occ->add_option("--trials", o_trials, "trials per rate");
    cmd_occ->add_option("--template-side", o_template_side, "template side");
    cmd_occ->add_option("--image-side", o_image_side, "image side");
    add_common(cmd_occ, fl);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed_ms = [&] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    };

    if (cmd_match->parsed()) {
        const oatm::GrayImage tmpl = oatm::load_pgm(template_path);
        const oatm::GrayImage image = oatm::load_pgm(image_path);
        oatm::MatchConfig cfg;
        if (space_name == "translation") {
            cfg.space.kind = SpaceKind::Translation;
            cfg.space.template_w = tmpl.width();
            cfg.space.template_h = tmpl.height();
            cfg.space.image_w = image.width();
            cfg.space.image_h = image.height();
            cfg.space.validate();
        } else if (space_name == "affine") {
            cfg.space = SpaceSpec::affine(tmpl.width(), image.width(), image.height(), scale_min,
                                          scale_max, rot_min, rot_max);
        } else {
            throw oatm::ContractViolation("match: unknown --space " + space_name);
        }
        apply_common(cfg, fl);
        const oatm::MatchResult res = oatm::match(tmpl, image, cfg);
        nlohmann::ordered_json j;
        j["transform"] = transform_json(res.transform);
        j["inlier_rate"] = res.inlier_rate;
        j["rounds_run"] = res.rounds_run;
        j["theoretical_success"] = res.theoretical_success;
        j["seed"] = res.seed;
        std::cout << j.dump(2) << "\n";
        std::cerr << "wall_ms: " << elapsed_ms() << "\n";
        return 0;
    }

    oatm::ExperimentReport rep;
    if (cmd_validate->parsed()) {
        const double sigma = fl.sigma_greylevels >= 0.0 ? fl.sigma_greylevels / 255.0 : 5.0 / 255.0;
        rep = oatm::run_guarantee_validation(v_trials, parse_doubles(alphas_csv),
                                             parse_ints(ks_csv), v_template_side, v_image_side,
                                             sigma, static_cast<std::uint64_t>(fl.seed));
    } else if (cmd_scal->parsed()) {
        std::vector<int> sides;
        for (std::int64_t s : parse_ints(sides_csv)) sides.push_back(static_cast<int>(s));
        rep = oatm::run_scalability(sides, s_template_side, s_trials,
                                    static_cast<std::uint64_t>(fl.seed));
    } else {
        rep = oatm::run_occlusion_sweep(parse_doubles(rates_csv), o_trials, o_template_side,
                                        o_image_side, static_cast<std::uint64_t>(fl.seed));
    }
    // Timing fields are nondeterministic; stdout stays byte-stable, full
    // report with timings goes to stderr.
    std::cout << (fl.text ? oatm::report_to_text(rep, false) : oatm::report_to_json(rep, false));
    std::cerr << oatm::report_to_text(rep, true);
    std::cerr << "wall_ms: " << elapsed_ms() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const oatm::PgmError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const oatm::ContractViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
