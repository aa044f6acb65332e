#include "romfsm/config.hpp"

#include "romfsm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace romfsm {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Section -> (key -> value), with duplicate detection. Keys are consumed as
// they are recognized; anything left over is a config error.
class KvStore {
public:
    KvStore(const std::string& text, const std::string& origin) : origin_(origin) {
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#' || t[0] == ';') continue;
            if (t.front() == '[') {
                if (t.back() != ']')
                    fail(lineno, "malformed section header '" + t + "'");
                section = trim(t.substr(1, t.size() - 2));
                if (section.empty()) fail(lineno, "empty section name");
                sections_[section];
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos) fail(lineno, "expected 'key = value', got '" + t + "'");
            if (section.empty()) fail(lineno, "key outside any [section]");
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            if (key.empty()) fail(lineno, "empty key");
            auto [it, inserted] = sections_[section].emplace(key, value);
            if (!inserted) fail(lineno, "duplicate key '" + key + "' in [" + section + "]");
        }
    }

    bool has_section(const std::string& s) const { return sections_.count(s) != 0; }

    std::optional<std::string> take(const std::string& section, const std::string& key) {
        auto sit = sections_.find(section);
        if (sit == sections_.end()) return std::nullopt;
        auto kit = sit->second.find(key);
        if (kit == sit->second.end()) return std::nullopt;
        std::string v = kit->second;
        sit->second.erase(kit);
        return v;
    }

    std::string require(const std::string& section, const std::string& key) {
        auto v = take(section, key);
        if (!v)
            throw ConfigError(origin_ + ": missing required key '" + key + "' in [" + section +
                              "]");
        return *v;
    }

    void finish(const std::vector<std::string>& known_sections) const {
        for (const auto& [section, kv] : sections_) {
            if (std::find(known_sections.begin(), known_sections.end(), section) ==
                known_sections.end())
                throw ConfigError(origin_ + ": unknown section [" + section + "]");
            if (!kv.empty())
                throw ConfigError(origin_ + ": unknown key '" + kv.begin()->first + "' in [" +
                                  section + "]");
        }
    }

private:
    [[noreturn]] void fail(int lineno, const std::string& msg) const {
        throw ConfigError(origin_ + ":" + std::to_string(lineno) + ": " + msg);
    }
    std::string origin_;
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

double to_double(const std::string& v, const std::string& what) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("invalid number for " + what + ": '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("invalid number for " + what + ": '" + v + "'");
    return out;
}

long to_long(const std::string& v, const std::string& what) {
    std::size_t pos = 0;
    long out = 0;
    try {
        out = std::stol(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("invalid integer for " + what + ": '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("invalid integer for " + what + ": '" + v + "'");
    return out;
}

bool to_bool(const std::string& v, const std::string& what) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("invalid boolean for " + what + ": '" + v + "'");
}

Vec to_time_list(const std::string& v, const std::string& what) {
    std::vector<double> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) continue;
        out.push_back(to_double(t, what));
    }
    Vec times(static_cast<long>(out.size()));
    for (std::size_t i = 0; i < out.size(); ++i) times(static_cast<long>(i)) = out[i];
    return times;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    KvStore kv(text, origin);
    ExperimentConfig cfg;

    const std::string problem = kv.require("experiment", "problem");
    if (problem == "burgers1d")
        cfg.problem = Problem::burgers1d;
    else if (problem == "turbulence2d")
        cfg.problem = Problem::turbulence2d;
    else
        throw ConfigError(origin + ": unknown problem '" + problem + "'");
    if (auto out = kv.take("experiment", "output")) cfg.output_dir = *out;

    if (cfg.problem == Problem::burgers1d) {
        cfg.burgers.re = to_double(kv.require("fom", "re"), "fom.re");
        cfg.burgers.dt = to_double(kv.require("fom", "dt"), "fom.dt");
        cfg.burgers.t_final = to_double(kv.require("fom", "t_final"), "fom.t_final");
        cfg.burgers.snapshot_stride =
            static_cast<int>(to_long(kv.require("fom", "snapshot_stride"), "fom.snapshot_stride"));
        const int n = static_cast<int>(to_long(kv.require("fom", "n"), "fom.n"));
        const double length = to_double(kv.require("fom", "length"), "fom.length");
        cfg.grid1d = Grid1D::uniform(n, length);
    } else {
        cfg.vorticity.re = to_double(kv.require("fom", "re"), "fom.re");
        cfg.vorticity.dt = to_double(kv.require("fom", "dt"), "fom.dt");
        cfg.vorticity.t_final = to_double(kv.require("fom", "t_final"), "fom.t_final");
        cfg.vorticity.snapshot_stride =
            static_cast<int>(to_long(kv.require("fom", "snapshot_stride"), "fom.snapshot_stride"));
        cfg.vorticity.kp = to_double(kv.require("fom", "kp"), "fom.kp");
        const int nx = static_cast<int>(to_long(kv.require("fom", "nx"), "fom.nx"));
        const int ny = static_cast<int>(to_long(kv.require("fom", "ny"), "fom.ny"));
        double lx = kTwoPi, ly = kTwoPi;
        if (auto v = kv.take("fom", "lx")) lx = to_double(*v, "fom.lx");
        if (auto v = kv.take("fom", "ly")) ly = to_double(*v, "fom.ly");
        cfg.grid2d = Grid2D::periodic(nx, ny, lx, ly);
        if (auto v = kv.take("fom", "arakawa_order")) {
            const long order = to_long(*v, "fom.arakawa_order");
            if (order == 2)
                cfg.vorticity.arakawa = ArakawaOrder::second;
            else if (order == 4)
                cfg.vorticity.arakawa = ArakawaOrder::fourth;
            else
                throw ConfigError(origin + ": fom.arakawa_order must be 2 or 4");
        }
        if (auto v = kv.take("fom", "laplacian")) {
            if (*v == "spectral")
                cfg.vorticity.laplacian = LaplacianKind::spectral;
            else if (*v == "fd5")
                cfg.vorticity.laplacian = LaplacianKind::fd5;
            else
                throw ConfigError(origin + ": fom.laplacian must be 'spectral' or 'fd5'");
        }
    }

    cfg.rom.r = static_cast<int>(to_long(kv.require("rom", "r"), "rom.r"));
    cfg.rom.dt = to_double(kv.require("rom", "dt"), "rom.dt");
    cfg.rom.t_final = to_double(kv.require("rom", "t_final"), "rom.t_final");

    const std::string strategy = kv.require("obs", "strategy");
    if (strategy == "full_projection")
        cfg.obs.strategy = ObsStrategy::full_projection;
    else if (strategy == "sparse_pinv")
        cfg.obs.strategy = ObsStrategy::sparse_pinv;
    else if (strategy == "sparse_reconstruction")
        cfg.obs.strategy = ObsStrategy::sparse_reconstruction;
    else
        throw ConfigError(origin + ": unknown obs.strategy '" + strategy + "'");

    const std::string layout = kv.require("obs", "layout");
    if (layout == "full")
        cfg.obs.layout = SensorLayout::Kind::full;
    else if (layout == "sparse")
        cfg.obs.layout = SensorLayout::Kind::sparse;
    else
        throw ConfigError(origin + ": unknown obs.layout '" + layout + "'");

    cfg.obs.times = to_time_list(kv.require("obs", "times"), "obs.times");
    cfg.obs.sigma = to_double(kv.require("obs", "sigma"), "obs.sigma");
    cfg.obs.seed = static_cast<std::uint64_t>(to_long(kv.require("obs", "seed"), "obs.seed"));
    if (auto v = kv.take("obs", "sensor_stride"))
        cfg.obs.sensor_stride = static_cast<int>(to_long(*v, "obs.sensor_stride"));

    cfg.fsm.window = to_double(kv.require("fsm", "window"), "fsm.window");
    if (auto v = kv.take("fsm", "max_iter"))
        cfg.fsm.max_iter = static_cast<int>(to_long(*v, "fsm.max_iter"));
    if (auto v = kv.take("fsm", "tol")) cfg.fsm.tol = to_double(*v, "fsm.tol");
    if (auto v = kv.take("fsm", "mode")) {
        if (*v == "global")
            cfg.fsm.mode = EddyViscosity::Mode::global;
        else if (*v == "per_mode")
            cfg.fsm.mode = EddyViscosity::Mode::per_mode;
        else
            throw ConfigError(origin + ": fsm.mode must be 'global' or 'per_mode'");
    }
    if (auto v = kv.take("fsm", "include_initial_condition"))
        cfg.fsm.include_initial_condition = to_bool(*v, "fsm.include_initial_condition");
    cfg.fsm.obs_times = cfg.obs.times;

    kv.finish({"experiment", "fom", "rom", "obs", "fsm"});
    cfg.apply_seed(cfg.obs.seed);
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), path);
}

void ExperimentConfig::apply_seed(std::uint64_t master_seed) {
    obs.seed = master_seed;
    vorticity.seed = derive_seed(master_seed, RngStream::initial_phases);
}

void ExperimentConfig::apply_scale(Scale scale) {
    if (scale == Scale::desk && problem == Problem::turbulence2d) {
        grid2d = Grid2D::periodic(128, 128, grid2d.lx, grid2d.ly);
    }
}

void ExperimentConfig::validate() const {
    if (problem == Problem::burgers1d)
        burgers.validate();
    else
        vorticity.validate(grid2d);

    if (rom.r < 1) throw ConfigError("rom.r must be >= 1");
    if (!(rom.dt > 0.0) || !(rom.t_final > 0.0))
        throw ConfigError("rom.dt and rom.t_final must be positive");

    const double snap_dt = (problem == Problem::burgers1d)
                               ? burgers.snapshot_stride * burgers.dt
                               : vorticity.snapshot_stride * vorticity.dt;
    if (obs.times.size() > 0) {
        for (long i = 0; i < obs.times.size(); ++i) {
            const double t = obs.times(i);
            if (t < 0.0 || t > rom.t_final)
                throw ConfigError("obs.times must lie inside the ROM horizon");
            if (std::abs(t - std::round(t / rom.dt) * rom.dt) > 1e-9)
                throw ConfigError("obs.times must be multiples of rom.dt");
            if (std::abs(t - std::round(t / snap_dt) * snap_dt) > 1e-9)
                throw ConfigError("obs.times must coincide with stored snapshot times");
        }
        if (!(fsm.window > 0.0) || fsm.window > rom.t_final * (1.0 + 1e-12))
            throw ConfigError("fsm.window must lie inside the ROM horizon");
        if (std::abs(fsm.window - std::round(fsm.window / rom.dt) * rom.dt) > 1e-9)
            throw ConfigError("fsm.window must be a multiple of rom.dt");
        fsm.validate();
    }

    const bool sparse_strategy = obs.strategy != ObsStrategy::full_projection;
    const bool sparse_layout = obs.layout == SensorLayout::Kind::sparse;
    if (sparse_strategy != sparse_layout)
        throw ConfigError("obs.strategy is incompatible with obs.layout");
    if (!(obs.sigma >= 0.0)) throw ConfigError("obs.sigma must be >= 0");
    if (obs.sensor_stride < 1) throw ConfigError("obs.sensor_stride must be >= 1");
}

}  // namespace romfsm
