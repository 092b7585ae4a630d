#include "graphspde/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fs = std::filesystem;

namespace graphspde {

namespace {

[[noreturn]] void parse_error(const std::string& file, int line, const std::string& what) {
    throw std::runtime_error(file + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_or_throw(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    return in;
}

} // namespace

Graph load_dataset(const std::string& dir) {
    const fs::path root(dir);

    auto nodes_in = open_or_throw(root / "nodes.txt");
    int n = -1;
    if (!(nodes_in >> n) || n < 0) parse_error("nodes.txt", 1, "expected a node count");

    std::vector<std::pair<int, int>> edges;
    {
        auto in = open_or_throw(root / "edges.txt");
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            std::istringstream ss(line);
            int u, v;
            if (!(ss >> u >> v)) parse_error("edges.txt", lineno, "expected 'u v'");
            std::string rest;
            if (ss >> rest) parse_error("edges.txt", lineno, "trailing content '" + rest + "'");
            if (u < 0 || v < 0 || u >= n || v >= n)
                parse_error("edges.txt", lineno, "node id out of range");
            edges.emplace_back(u, v);
        }
    }
    Graph g = build_graph(edges, n);

    if (fs::exists(root / "labels.txt")) {
        auto in = open_or_throw(root / "labels.txt");
        std::vector<int> labels;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            std::istringstream ss(line);
            int y;
            if (!(ss >> y) || y < 0) parse_error("labels.txt", lineno, "expected a class id");
            labels.push_back(y);
        }
        if (static_cast<int>(labels.size()) != n)
            throw std::runtime_error("labels.txt: " + std::to_string(labels.size()) +
                                     " labels for " + std::to_string(n) + " nodes");
        g.labels = std::move(labels);
    }

    if (fs::exists(root / "features.csv")) {
        auto in = open_or_throw(root / "features.csv");
        std::vector<std::vector<double>> rows;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            std::vector<double> row;
            std::istringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) {
                try {
                    std::size_t pos = 0;
                    row.push_back(std::stod(cell, &pos));
                    if (pos != cell.find_last_not_of(" \t") + 1 && pos < cell.size() &&
                        cell.find_first_not_of(" \t", pos) != std::string::npos)
                        throw std::invalid_argument(cell);
                } catch (const std::exception&) {
                    parse_error("features.csv", lineno, "bad value '" + cell + "'");
                }
            }
            if (!rows.empty() && row.size() != rows.front().size())
                parse_error("features.csv", lineno,
                            "row has " + std::to_string(row.size()) + " columns, expected " +
                                std::to_string(rows.front().size()));
            rows.push_back(std::move(row));
        }
        if (static_cast<int>(rows.size()) != n)
            throw std::runtime_error("features.csv: " + std::to_string(rows.size()) +
                                     " rows for " + std::to_string(n) + " nodes");
        Eigen::MatrixXd X(n, rows.empty() ? 0 : rows.front().size());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < X.cols(); ++j) X(i, j) = rows[i][j];
        g.features = std::move(X);
    }
    return g;
}

void save_dataset(const Graph& g, const std::string& dir) {
    const fs::path root(dir);
    fs::create_directories(root);

    {
        std::ofstream out(root / "nodes.txt");
        out << g.num_nodes << "\n";
    }
    {
        std::ofstream out(root / "edges.txt");
        for (const auto& [u, v] : g.edge_list()) out << u << " " << v << "\n";
    }
    if (g.labels) {
        std::ofstream out(root / "labels.txt");
        for (int y : *g.labels) out << y << "\n";
    }
    if (g.features) {
        std::ofstream out(root / "features.csv");
        out.precision(17);
        const auto& X = *g.features;
        for (int i = 0; i < X.rows(); ++i) {
            for (int j = 0; j < X.cols(); ++j) {
                if (j) out << ",";
                out << X(i, j);
            }
            out << "\n";
        }
    }
}

} // namespace graphspde
