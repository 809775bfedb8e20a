#include "protogrow/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace protogrow::harness {

dyn::RunParams RunConfig::run_params() const {
    dyn::RunParams p{step_sizes(), theta_w,  phi_g,     k_protos, lambda_barrier,
                     max_heads,   max_steps, seed,      true};
    return p;
}

void RunConfig::validate() const {
    if (n_tokens < 2) throw std::invalid_argument("config: n_tokens must be >= 2");
    if (dim < 2) throw std::invalid_argument("config: dim must be >= 2");
    if (2 * n_blocks > dim) throw std::invalid_argument("config: need 2*n_blocks <= dim");
    if (n_blocks == 0) throw std::invalid_argument("config: n_blocks must be >= 1");
    if (rho <= 0.0 || rho >= 1.0) throw std::invalid_argument("config: rho must lie in (0,1)");
    if (lambda1 <= 0.0) throw std::invalid_argument("config: lambda1 must be > 0");
    if (theta_w <= 0.0) throw std::invalid_argument("config: theta_w must be > 0");
    if (phi_g <= 0.0) throw std::invalid_argument("config: phi_g must be > 0");
    if (phi_g >= theta_w)
        throw std::invalid_argument("config: phi_g must be below theta_w");
    if (k_protos < 2) throw std::invalid_argument("config: k_protos must be >= 2");
    if (max_heads < 1) throw std::invalid_argument("config: max_heads must be >= 1");
    if (lambda_barrier <= 0.0) throw std::invalid_argument("config: lambda_barrier must be > 0");
    if (token_scale <= 0.0) throw std::invalid_argument("config: token_scale must be > 0");
    if (rho_scale <= 0.0) throw std::invalid_argument("config: rho_scale must be > 0");
    step_sizes();  // enforces rate ordering and temperature range
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig parse_config_text(const std::string& text, RunConfig base) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (val.empty())
            throw std::invalid_argument("config: empty value for key '" + key + "'");

        auto as_double = [&] { return std::stod(val); };
        auto as_size = [&] { return static_cast<std::size_t>(std::stoull(val)); };

        if (key == "n_tokens") base.n_tokens = as_size();
        else if (key == "dim") base.dim = as_size();
        else if (key == "rho") base.rho = as_double();
        else if (key == "lambda1") base.lambda1 = as_double();
        else if (key == "n_blocks") base.n_blocks = as_size();
        else if (key == "theta_w") base.theta_w = as_double();
        else if (key == "phi_g") base.phi_g = as_double();
        else if (key == "k_protos") base.k_protos = as_size();
        else if (key == "t_init") base.t_init = as_double();
        else if (key == "t_min") base.t_min = as_double();
        else if (key == "eta_t") base.eta_t = as_double();
        else if (key == "eta_p") base.eta_p = as_double();
        else if (key == "eta_plus") base.eta_plus = as_double();
        else if (key == "n_min") base.n_min = as_size();
        else if (key == "lambda_barrier") base.lambda_barrier = as_double();
        else if (key == "max_heads") base.max_heads = as_size();
        else if (key == "max_steps") base.max_steps = as_size();
        else if (key == "seed") base.seed = std::stoull(val);
        else if (key == "out_dir") base.out_dir = val;
        else if (key == "token_scale") base.token_scale = as_double();
        else if (key == "rho_scale") base.rho_scale = as_double();
        else if (key == "whiten") base.whiten = (val == "true" || val == "1");
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), std::move(base));
}

std::string config_to_text(const RunConfig& cfg) {
    char buf[4096];
    std::snprintf(buf, sizeof(buf),
                  "n_tokens = %zu\ndim = %zu\nrho = %.17g\nlambda1 = %.17g\nn_blocks = %zu\n"
                  "theta_w = %.17g\nphi_g = %.17g\nk_protos = %zu\nt_init = %.17g\n"
                  "t_min = %.17g\neta_t = %.17g\neta_p = %.17g\neta_plus = %.17g\nn_min = %zu\n"
                  "lambda_barrier = %.17g\nmax_heads = %zu\nmax_steps = %zu\nseed = %llu\n"
                  "out_dir = %s\ntoken_scale = %.17g\nrho_scale = %.17g\nwhiten = %s\n",
                  cfg.n_tokens, cfg.dim, cfg.rho, cfg.lambda1, cfg.n_blocks, cfg.theta_w,
                  cfg.phi_g, cfg.k_protos, cfg.t_init, cfg.t_min, cfg.eta_t, cfg.eta_p,
                  cfg.eta_plus, cfg.n_min, cfg.lambda_barrier, cfg.max_heads, cfg.max_steps,
                  static_cast<unsigned long long>(cfg.seed), cfg.out_dir.c_str(),
                  cfg.token_scale, cfg.rho_scale, cfg.whiten ? "true" : "false");
    return std::string(buf);
}

}  // namespace protogrow::harness
