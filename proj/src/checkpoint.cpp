#include "graphspde/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace graphspde {

void save_checkpoint(const ModelParams& params, const ModelConfig& dims,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
    out.precision(17);
    out << "graphspde-checkpoint v1\n";
    out << "dims " << dims.feature_dim << " " << dims.hidden_dim << " "
        << dims.num_classes << " " << dims.gcn_layers << "\n";
    for (const auto& [name, t] : params.tensors()) {
        out << "tensor " << name << " " << t->rows() << " " << t->cols() << "\n";
        for (int i = 0; i < t->rows(); ++i) {
            for (int j = 0; j < t->cols(); ++j) {
                if (j) out << " ";
                out << (*t)(i, j);
            }
            out << "\n";
        }
    }
}

std::pair<ModelParams, ModelConfig> load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "graphspde-checkpoint v1")
        throw std::runtime_error("load_checkpoint: bad header in " + path);

    ModelConfig dims;
    {
        std::string tag;
        in >> tag >> dims.feature_dim >> dims.hidden_dim >> dims.num_classes >>
            dims.gcn_layers;
        if (tag != "dims") throw std::runtime_error("load_checkpoint: missing dims line");
    }
    ModelParams params = init_params(dims, 0);
    auto tensors = params.tensors();
    for (auto& [name, t] : tensors) {
        std::string tag, got_name;
        int rows, cols;
        if (!(in >> tag >> got_name >> rows >> cols) || tag != "tensor")
            throw std::runtime_error("load_checkpoint: missing tensor record for " + name);
        if (got_name != name || rows != t->rows() || cols != t->cols())
            throw std::runtime_error("load_checkpoint: tensor mismatch, expected " + name +
                                     " got " + got_name);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                if (!(in >> (*t)(i, j)))
                    throw std::runtime_error("load_checkpoint: truncated values in " + name);
    }
    return {params, dims};
}

} // namespace graphspde
