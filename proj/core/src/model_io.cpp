#include "readc/model_io.hpp"

#include <fstream>
#include <sstream>

namespace readc {

namespace {

void expect_tag(std::istream& in, const std::string& want) {
    std::string got;
    in >> got;
    if (got != want)
        throw std::runtime_error("model file: expected '" + want + "', found '" + got + "'");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

void dump_tree(std::ostream& out, const std::vector<RegressionTree::Node>& nodes, int id) {
    const auto& n = nodes[id];
    if (n.feature < 0) {
        out << "leaf " << n.value << "\n";
        return;
    }
    out << "split " << n.feature << " " << n.threshold << "\n";
    dump_tree(out, nodes, n.left);
    dump_tree(out, nodes, n.right);
}

int read_tree(std::istream& in, std::vector<RegressionTree::Node>& nodes) {
    std::string kind;
    in >> kind;
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (kind == "leaf") {
        in >> nodes[id].value;
    } else if (kind == "split") {
        in >> nodes[id].feature >> nodes[id].threshold;
        const int left = read_tree(in, nodes);
        const int right = read_tree(in, nodes);
        nodes[id].left = left;
        nodes[id].right = right;
    } else {
        throw std::runtime_error("model file: bad tree node '" + kind + "'");
    }
    return id;
}

}  // namespace

void save_mlp(std::ostream& out, const Mlp& net) {
    out << "mlp " << net.layer_sizes().size();
    for (int s : net.layer_sizes()) out << " " << s;
    out << "\n";
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        for (double w : net.weights()[l]) out << w << " ";
        out << "\n";
        for (double b : net.biases()[l]) out << b << " ";
        out << "\n";
    }
}

Mlp load_mlp(std::istream& in) {
    expect_tag(in, "mlp");
    std::size_t n_sizes = 0;
    in >> n_sizes;
    if (!in || n_sizes < 2 || n_sizes > 64) throw std::runtime_error("model file: bad mlp header");
    std::vector<int> sizes(n_sizes);
    for (int& s : sizes) in >> s;

    Rng dummy(0);
    Mlp net(sizes, dummy);
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        for (double& w : net.weights()[l]) in >> w;
        for (double& b : net.biases()[l]) in >> b;
    }
    if (!in) throw std::runtime_error("model file: truncated mlp");
    return net;
}

void save_agent(const std::string& path, const Agent& agent) {
    std::ofstream out = open_out(path);
    if (const auto* dqn = dynamic_cast<const DqnAgent*>(&agent)) {
        out << "dqn\n";
        save_mlp(out, dqn->learned_net());
    } else if (const auto* a2c = dynamic_cast<const A2cAgent*>(&agent)) {
        out << "a2c\n";
        save_mlp(out, a2c->actor_net());
        save_mlp(out, a2c->critic_net());
    } else {
        throw std::runtime_error("save_agent: unknown agent kind");
    }
}

std::unique_ptr<Agent> load_agent(const std::string& path, const AgentConfig& cfg) {
    std::ifstream in = open_in(path);
    std::string kind;
    in >> kind;
    Rng dummy(0);
    AgentConfig local = cfg;
    if (kind == "dqn") {
        Mlp net = load_mlp(in);
        local.hidden_width = net.layer_sizes()[1];
        auto agent = std::make_unique<DqnAgent>(net.input_dim(), net.output_dim(), local, dummy);
        agent->restore_networks(net);
        return agent;
    }
    if (kind == "a2c") {
        Mlp actor = load_mlp(in);
        Mlp critic = load_mlp(in);
        local.hidden_width = actor.layer_sizes()[1];
        const int action_dim = actor.output_dim() / 2;
        auto agent = std::make_unique<A2cAgent>(actor.input_dim(), action_dim, local, dummy);
        agent->restore_networks(actor, critic);
        return agent;
    }
    throw std::runtime_error("model file: unknown agent tag '" + kind + "' in " + path);
}

void save_predictor(const std::string& path, const GbmModel& model) {
    std::ofstream out = open_out(path);
    out << "gbm\n";
    out << "base " << model.base() << "\n";
    out << "shrinkage " << model.shrinkage() << "\n";
    out << "trees " << model.trees().size() << "\n";
    for (const RegressionTree& tree : model.trees()) dump_tree(out, tree.nodes(), 0);
}

void save_predictor(const std::string& path, const LinearModel& model) {
    std::ofstream out = open_out(path);
    out << "linear\n";
    out << "intercept " << model.intercept << "\n";
    out << "coef " << model.coefficients.size();
    for (double c : model.coefficients) out << " " << c;
    out << "\n";
}

std::unique_ptr<UncertaintyPredictor> load_predictor(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string kind;
    in >> kind;
    if (kind == "gbm") {
        double base = 0.0, shrinkage = 0.0;
        std::size_t n_trees = 0;
        expect_tag(in, "base");
        in >> base;
        expect_tag(in, "shrinkage");
        in >> shrinkage;
        expect_tag(in, "trees");
        in >> n_trees;
        std::vector<RegressionTree> trees;
        trees.reserve(n_trees);
        for (std::size_t t = 0; t < n_trees; ++t) {
            RegressionTree tree;
            read_tree(in, tree.mutable_nodes());
            trees.push_back(std::move(tree));
        }
        if (!in) throw std::runtime_error("model file: truncated gbm in " + path);
        return std::make_unique<GbmModel>(make_gbm(base, shrinkage, std::move(trees)));
    }
    if (kind == "linear") {
        auto model = std::make_unique<LinearModel>();
        expect_tag(in, "intercept");
        in >> model->intercept;
        expect_tag(in, "coef");
        std::size_t n = 0;
        in >> n;
        model->coefficients.resize(n);
        for (double& c : model->coefficients) in >> c;
        if (!in) throw std::runtime_error("model file: truncated linear model in " + path);
        return model;
    }
    throw std::runtime_error("model file: unknown predictor tag '" + kind + "' in " + path);
}

void write_dataset_csv(std::ostream& out, const RegressionDataset& data) {
    out << "snapshot,row";
    for (std::size_t f = 0; f < UncertaintyRecord::kFeatureCount; ++f) out << ",f" << f;
    out << ",target\n";
    std::size_t snapshot = 0;
    std::size_t boundary = data.snapshot_row_counts.empty() ? data.size()
                                                            : data.snapshot_row_counts[0];
    std::size_t row_in_snapshot = 0;
    std::size_t consumed = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (row_in_snapshot >= boundary) {
            ++snapshot;
            consumed += boundary;
            row_in_snapshot = 0;
            boundary = snapshot < data.snapshot_row_counts.size()
                           ? data.snapshot_row_counts[snapshot]
                           : data.size() - consumed;
        }
        out << snapshot << "," << row_in_snapshot;
        for (double f : data.features[i]) out << "," << f;
        out << "," << data.targets[i] << "\n";
        ++row_in_snapshot;
    }
}

}  // namespace readc
