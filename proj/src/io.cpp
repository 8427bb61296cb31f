#include "jst/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "json.hpp"

namespace jst {

using ordered_json = nlohmann::ordered_json;

double ExperimentConfig::sweep_max_or_default() const {
    if (sweep.max) return *sweep.max;
    return 0.9 / system.total_arrival_rate();
}

namespace {

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument(msg); }

void require_keys(const ordered_json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) bad("unknown key \"" + it.key() + "\" in " + where);
}

double num(const ordered_json& obj, const char* key) {
    const auto& v = obj.at(key);
    if (!v.is_number()) bad(std::string("field \"") + key + "\" must be a number");
    return v.get<double>();
}

void parse_dist(const ordered_json& j, ExperimentConfig& out) {
    if (!j.is_object()) bad("\"dist\" must be an object");
    if (j.contains("pareto")) {
        require_keys(j, "dist", {"pareto"});
        const auto& p = j.at("pareto");
        if (!p.is_object()) bad("\"pareto\" must be an object");
        require_keys(p, "dist.pareto", {"alpha", "beta", "x_m", "x_M"});
        for (const char* k : {"alpha", "beta", "x_m", "x_M"})
            if (!p.contains(k)) bad(std::string("missing field \"") + k + "\" in dist.pareto");
        out.system.dist = pareto_tail_dist(num(p, "alpha"), num(p, "beta"), num(p, "x_m"),
                                           num(p, "x_M"));
        out.pareto_given = true;
        return;
    }
    require_keys(j, "dist", {"x_m", "x_M", "p_small"});
    for (const char* k : {"x_m", "x_M", "p_small"})
        if (!j.contains(k)) bad(std::string("missing field \"") + k + "\" in dist");
    out.system.dist.small_size = num(j, "x_m");
    out.system.dist.large_size = num(j, "x_M");
    out.system.dist.p_small = num(j, "p_small");
}

void parse_profile(const ordered_json& j, ExperimentConfig& out) {
    if (!j.is_object()) bad("\"profile\" must be an object");
    require_keys(j, "profile", {"family", "a", "b", "pmm0", "pMM0"});
    if (!j.contains("family")) bad("missing field \"family\" in profile");
    const auto& fam = j.at("family");
    if (!fam.is_string()) bad("profile family must be a string");
    if (!family_from_name(fam.get<std::string>(), out.system.profile.family))
        bad("unknown profile family \"" + fam.get<std::string>() + "\"");
    if (j.contains("a")) {
        out.system.profile.rate_small = num(j, "a");
        out.profile_a_given = true;
    }
    if (j.contains("b")) {
        out.system.profile.rate_large = num(j, "b");
        out.profile_b_given = true;
    }
    if (j.contains("pmm0")) {
        out.system.profile.diag_small0 = num(j, "pmm0");
        out.profile_pmm0_given = true;
    }
    if (j.contains("pMM0")) {
        out.system.profile.diag_large0 = num(j, "pMM0");
        out.profile_pMM0_given = true;
    }
}

void parse_cost(const ordered_json& j, ExperimentConfig& out) {
    if (!j.is_object()) bad("\"cost_fn\" must be an object");
    require_keys(j, "cost_fn", {"kind", "kappa"});
    if (!j.contains("kind")) bad("missing field \"kind\" in cost_fn");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "identity") {
        out.system.cost.kind = CostKind::Identity;
    } else if (kind == "scaled") {
        out.system.cost.kind = CostKind::Scaled;
        if (!j.contains("kappa")) bad("missing field \"kappa\" in scaled cost_fn");
    } else {
        bad("cost_fn kind must be \"identity\" or \"scaled\"");
    }
    if (j.contains("kappa")) {
        out.system.cost.kappa = num(j, "kappa");
        out.cost_kappa_given = true;
    }
    out.cost_given = true;
}

void parse_sweep(const ordered_json& j, ExperimentConfig& out) {
    require_keys(j, "sweep", {"max", "points", "spacing"});
    if (j.contains("max")) out.sweep.max = num(j, "max");
    if (j.contains("points")) {
        int p = j.at("points").get<int>();
        if (p < 4) bad("sweep points must be >= 4");
        out.sweep.points = p;
    }
    if (j.contains("spacing")) {
        std::string s = j.at("spacing").get<std::string>();
        if (s != "hybrid" && s != "linear") bad("sweep spacing must be \"hybrid\" or \"linear\"");
        out.sweep.spacing = s;
    }
}

void parse_sim(const ordered_json& j, ExperimentConfig& out) {
    require_keys(j, "sim", {"jobs", "warmup", "seed", "replications"});
    if (j.contains("jobs")) {
        long v = j.at("jobs").get<long>();
        if (v < 1) bad("sim jobs must be >= 1");
        out.sim.jobs = v;
    }
    if (j.contains("warmup")) out.sim.warmup = j.at("warmup").get<long>();
    if (j.contains("seed")) out.sim.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("replications")) {
        int v = j.at("replications").get<int>();
        if (v < 1) bad("sim replications must be >= 1");
        out.sim.replications = v;
    }
}

void parse_design(const ordered_json& j, ExperimentConfig& out) {
    require_keys(j, "design", {"gamma", "theta", "tau"});
    if (j.contains("gamma")) {
        double g = num(j, "gamma");
        if (!(g > 0)) bad("design gamma must be positive");
        out.design.gamma = g;
    }
    if (j.contains("theta")) out.design.theta = num(j, "theta");
    if (j.contains("tau")) out.design.tau = num(j, "tau");
}

void parse_output(const ordered_json& j, ExperimentConfig& out) {
    require_keys(j, "output", {"csv", "svg"});
    if (j.contains("csv")) out.output.csv = j.at("csv").get<std::string>();
    if (j.contains("svg")) out.output.svg = j.at("svg").get<std::string>();
}

}  // namespace

ParseResult parse_experiment_config(const std::string& json_text) {
    ParseResult res;
    try {
        ordered_json j = ordered_json::parse(json_text);
        if (!j.is_object()) bad("config root must be a JSON object");
        require_keys(j, "config",
                     {"n_servers", "rho", "lambda_per_server", "dist", "profile", "cost_fn",
                      "sweep", "sim", "design", "output"});
        ExperimentConfig& cfg = res.config;
        if (!j.contains("n_servers")) bad("missing field \"n_servers\"");
        cfg.system.n_servers = j.at("n_servers").get<int>();
        if (!j.contains("dist")) bad("missing field \"dist\"");
        parse_dist(j.at("dist"), cfg);
        if (!j.contains("profile")) bad("missing field \"profile\"");
        parse_profile(j.at("profile"), cfg);
        if (j.contains("cost_fn")) parse_cost(j.at("cost_fn"), cfg);

        if (j.contains("rho") == j.contains("lambda_per_server"))
            bad("exactly one of \"rho\" and \"lambda_per_server\" is required");
        if (j.contains("rho")) {
            cfg.rho_given = true;
            cfg.rho = num(j, "rho");
            if (!(cfg.rho > 0)) bad("rho must be positive");
            cfg.system.lambda_per_server = cfg.rho / cfg.system.dist.mean();
        } else {
            cfg.lambda_given = true;
            cfg.system.lambda_per_server = num(j, "lambda_per_server");
        }

        if (j.contains("sweep")) parse_sweep(j.at("sweep"), cfg);
        if (j.contains("sim")) parse_sim(j.at("sim"), cfg);
        if (j.contains("design")) parse_design(j.at("design"), cfg);
        if (j.contains("output")) parse_output(j.at("output"), cfg);

        if (!(cfg.system.load() < 1)) {
            res.error = ConfigError::Unstable;
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "unstable system: per-server load lambda * E[X] = %.6g >= 1",
                          cfg.system.load());
            res.message = buf;
            return res;
        }
        cfg.system.validate();
    } catch (const std::exception& e) {
        res.error = ConfigError::Malformed;
        res.message = e.what();
    }
    return res;
}

ParseResult load_experiment_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ParseResult res;
        res.error = ConfigError::Malformed;
        res.message = "cannot open config file: " + path;
        return res;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_experiment_config(text);
}

std::string serialize_experiment_config(const ExperimentConfig& cfg) {
    ordered_json j;
    j["n_servers"] = cfg.system.n_servers;
    if (cfg.rho_given)
        j["rho"] = cfg.rho;
    else
        j["lambda_per_server"] = cfg.system.lambda_per_server;
    if (cfg.pareto_given) {
        j["dist"]["pareto"] = {{"alpha", cfg.system.dist.tail_alpha},
                               {"beta", cfg.system.dist.tail_beta},
                               {"x_m", cfg.system.dist.small_size},
                               {"x_M", cfg.system.dist.large_size}};
    } else {
        j["dist"] = {{"x_m", cfg.system.dist.small_size},
                     {"x_M", cfg.system.dist.large_size},
                     {"p_small", cfg.system.dist.p_small}};
    }
    j["profile"]["family"] = family_name(cfg.system.profile.family);
    if (cfg.profile_a_given) j["profile"]["a"] = cfg.system.profile.rate_small;
    if (cfg.profile_b_given) j["profile"]["b"] = cfg.system.profile.rate_large;
    if (cfg.profile_pmm0_given) j["profile"]["pmm0"] = cfg.system.profile.diag_small0;
    if (cfg.profile_pMM0_given) j["profile"]["pMM0"] = cfg.system.profile.diag_large0;
    if (cfg.cost_given) {
        j["cost_fn"]["kind"] = cfg.system.cost.kind == CostKind::Identity ? "identity" : "scaled";
        if (cfg.cost_kappa_given) j["cost_fn"]["kappa"] = cfg.system.cost.kappa;
    }
    if (cfg.sweep.max || cfg.sweep.points || cfg.sweep.spacing) {
        if (cfg.sweep.max) j["sweep"]["max"] = *cfg.sweep.max;
        if (cfg.sweep.points) j["sweep"]["points"] = *cfg.sweep.points;
        if (cfg.sweep.spacing) j["sweep"]["spacing"] = *cfg.sweep.spacing;
    }
    if (cfg.sim.jobs || cfg.sim.warmup || cfg.sim.seed || cfg.sim.replications) {
        if (cfg.sim.jobs) j["sim"]["jobs"] = *cfg.sim.jobs;
        if (cfg.sim.warmup) j["sim"]["warmup"] = *cfg.sim.warmup;
        if (cfg.sim.seed) j["sim"]["seed"] = *cfg.sim.seed;
        if (cfg.sim.replications) j["sim"]["replications"] = *cfg.sim.replications;
    }
    if (cfg.design.gamma || cfg.design.theta || cfg.design.tau) {
        if (cfg.design.gamma) j["design"]["gamma"] = *cfg.design.gamma;
        if (cfg.design.theta) j["design"]["theta"] = *cfg.design.theta;
        if (cfg.design.tau) j["design"]["tau"] = *cfg.design.tau;
    }
    if (cfg.output.csv || cfg.output.svg) {
        if (cfg.output.csv) j["output"]["csv"] = *cfg.output.csv;
        if (cfg.output.svg) j["output"]["svg"] = *cfg.output.svg;
    }
    return j.dump(2) + "\n";
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void CsvWriter::header(const std::vector<std::string>& cols) {
    if (!metadata_.empty()) {
        body_ += "# " + metadata_ + "\n";
        metadata_.clear();
    }
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) body_ += ',';
        body_ += cols[i];
    }
    body_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) body_ += ',';
        body_ += format_number(values[i]);
    }
    body_ += '\n';
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) body_ += ',';
        body_ += cells[i];
    }
    body_ += '\n';
}

void CsvWriter::write() const {
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path_);
    out << body_;
    if (!out) throw std::runtime_error("write failed: " + path_);
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += ch;
        }
    }
    return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series, bool log_x) {
    const double width = 860, height = 540;
    const double left = 72, right = 840, top = 48, bottom = 480;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            if (log_x && !(x > 0)) continue;
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!std::isfinite(xmin)) {  // nothing plottable; keep the file valid
        xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    }
    if (log_x) {
        xmin = std::log10(xmin);
        xmax = std::log10(xmax);
    }
    if (xmax - xmin < 1e-300) xmax = xmin + 1;
    if (ymax - ymin < 1e-12 * std::max(1.0, std::abs(ymax))) {
        double pad = std::max(1e-6, std::abs(ymax) * 1e-3);
        ymin -= pad;
        ymax += pad;
    }
    double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto sx = [&](double x) {
        double v = log_x ? std::log10(x) : x;
        return left + (v - xmin) / (xmax - xmin) * (right - left);
    };
    auto sy = [&](double y) { return bottom - (y - ymin) / (ymax - ymin) * (bottom - top); };

    std::string svg;
    char buf[512];
    auto add = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof buf, fmt, args...);
        svg += buf;
    };

    add("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
        "viewBox=\"0 0 %.0f %.0f\">\n",
        width, height, width, height);
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    add("<text x=\"%.0f\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"16\">%s</text>\n",
        0.5 * (left + right), xml_escape(title).c_str());

    add("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", left,
        bottom, right, bottom);
    add("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", left, top,
        left, bottom);

    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        double fx = xmin + (xmax - xmin) * i / ticks;
        double px = left + (right - left) * static_cast<double>(i) / ticks;
        double label = log_x ? std::pow(10.0, fx) : fx;
        add("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", px,
            bottom, px, bottom + 5);
        add("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            "font-size=\"11\">%.4g</text>\n",
            px, bottom + 18, label);
        double fy = ymin + (ymax - ymin) * i / ticks;
        double py = sy(fy);
        add("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
            left - 5, py, left, py);
        add("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-family=\"sans-serif\" "
            "font-size=\"11\">%.4g</text>\n",
            left - 8, py + 4, fy);
    }
    add("<text x=\"%.0f\" y=\"%.0f\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\">%s</text>\n",
        0.5 * (left + right), bottom + 40, xml_escape(x_label).c_str());
    add("<text x=\"18\" y=\"%.0f\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\" transform=\"rotate(-90 18 %.0f)\">%s</text>\n",
        0.5 * (top + bottom), 0.5 * (top + bottom), xml_escape(y_label).c_str());

    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = kPalette[si % (sizeof kPalette / sizeof *kPalette)];
        std::string pts;
        for (auto [x, y] : series[si].points) {
            if (log_x && !(x > 0)) continue;
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", sx(x), sy(y));
            pts += buf;
        }
        add("<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.6\" points=\"%s\"/>\n",
            color, pts.c_str());
        double ly = top + 16.0 * static_cast<double>(si);
        add("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" "
            "stroke-width=\"2\"/>\n",
            right - 150.0, ly, right - 126.0, ly, color);
        add("<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\">%s</text>\n",
            right - 120.0, ly + 4, xml_escape(series[si].label).c_str());
    }
    svg += "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << svg;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace jst
