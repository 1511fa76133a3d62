#include "lrt/model_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "lrt/data_io.hpp"

namespace lrt {

using nlohmann::json;

void save_model(const std::string& path, const TransformModel& model) {
    json manifest;
    manifest["kind"] = model.kind == TransformKind::Global ? "global" : "per-class";
    manifest["num_transforms"] = model.transforms.size();
    manifest["gamma"] = model.config.gamma;
    manifest["step_size"] = model.config.step_size;
    manifest["iterations"] = model.config.iterations;
    manifest["out_dim"] = model.config.out_dim;
    manifest["lambda"] = model.config.lambda;
    manifest["minibatches"] = model.config.minibatches;
    manifest["seed"] = model.config.seed;
    manifest["delta_rel"] = model.config.delta_rel;
    manifest["dc_outer_iterations"] = model.config.dc_outer_iterations;
    manifest["objective_trace"] = model.objective_trace;
    for (size_t c = 0; c < model.transforms.size(); ++c)
        save_matrix(path + ".T" + std::to_string(c) + ".bin", model.transforms[c],
                    MatrixFormat::Binary);
    atomic_write(path, manifest.dump(2) + "\n");
}

TransformModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model manifest " + path);
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed model manifest " + path + ": " + e.what());
    }
    TransformModel model;
    try {
        std::string kind = manifest.at("kind").get<std::string>();
        if (kind == "global") model.kind = TransformKind::Global;
        else if (kind == "per-class") model.kind = TransformKind::PerClass;
        else throw std::runtime_error("unknown kind '" + kind + "'");
        size_t n = manifest.at("num_transforms").get<size_t>();
        model.config.gamma = manifest.value("gamma", 1.0);
        model.config.step_size = manifest.value("step_size", 0.02);
        model.config.iterations = manifest.value("iterations", 100);
        model.config.out_dim = manifest.value("out_dim", 0);
        model.config.lambda = manifest.value("lambda", 1.0);
        model.config.minibatches = manifest.value("minibatches", 1);
        model.config.seed = manifest.value("seed", std::uint64_t{42});
        model.config.delta_rel = manifest.value("delta_rel", 1e-6);
        model.config.dc_outer_iterations = manifest.value("dc_outer_iterations", 1);
        if (manifest.contains("objective_trace"))
            model.objective_trace =
                manifest["objective_trace"].get<std::vector<double>>();
        for (size_t c = 0; c < n; ++c)
            model.transforms.push_back(load_matrix(
                path + ".T" + std::to_string(c) + ".bin", MatrixFormat::Binary));
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed model manifest " + path + ": " + e.what());
    }
    if (model.transforms.empty())
        throw std::runtime_error("malformed model manifest " + path + ": no transforms");
    return model;
}

} // namespace lrt
