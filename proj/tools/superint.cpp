// superint: run one verification or simulation command.
//   superint verify-algebra --seed 42
//   superint spectrum --config run.json --out out/spectrum

#include "superint/cli.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"superint"};
    std::string command, config_path, out;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    app.add_option("command", command, "command to run")->check(CLI::IsMember(superint::commands()));
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "random seed");
    app.add_option("--out", out, "output directory");
    app.add_option("--tol", tol, "check tolerance");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        nlohmann::json j = nlohmann::json::object();
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            try {
                j = nlohmann::json::parse(is);
            } catch (const nlohmann::json::exception& e) {
                throw superint::UsageError(std::string("cannot parse config: ") + e.what());
            }
        }
        if (!j.is_object()) throw superint::UsageError("config must be a JSON object");
        if (!command.empty()) j["command"] = command;
        if (!j.contains("command")) throw superint::UsageError("no command given");
        if (seed) j["seed"] = *seed;
        if (!out.empty()) j["out"] = out;
        if (tol) j["tol"] = *tol;
        const auto cfg = superint::RunConfig::from_json(j);
        const auto res = superint::run(cfg);
        std::cout << (res.exit_code == 0 ? "pass" : "FAIL") << ' ' << cfg.command << " -> " << cfg.out << "/report.json\n";
        for (const auto& f : res.report["failures"]) std::cout << "  failed: " << f["name"].get<std::string>() << '\n';
        return res.exit_code;
    } catch (const superint::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
