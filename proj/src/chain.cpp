#include "fvlab/chain.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace fvlab {

bool strongly_connected(const Mat& support) {
  const int n = static_cast<int>(support.rows());
  if (n == 0) return false;
  if (n == 1) return true;
  auto reach = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        double w = forward ? support(u, v) : support(v, u);
        if (w > tol::support_zero && !seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  return reach(true) && reach(false);
}

FiniteChain build_chain(const Mat& transition, const std::vector<std::string>& states,
                        const std::vector<std::string>& domain_labels) {
  const int m = static_cast<int>(states.size());
  if (transition.rows() != m || transition.cols() != m)
    throw NotStochastic("transition matrix is not square of size |states|");
  for (int i = 0; i < m; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < m; ++j) {
      if (transition(i, j) < 0.0)
        throw NotStochastic("negative entry at row " + std::to_string(i) + ", col " +
                            std::to_string(j));
      row_sum += transition(i, j);
    }
    if (std::abs(row_sum - 1.0) > tol::row_sum)
      throw NotStochastic("row " + std::to_string(i) + " sums to " + std::to_string(row_sum));
  }
  if (domain_labels.empty()) throw EmptyDomain("domain is empty");

  std::unordered_map<std::string, int> label_to_index;
  for (int i = 0; i < m; ++i) label_to_index[states[i]] = i;

  FiniteChain chain;
  chain.states = states;
  chain.transition = transition;
  chain.domain = domain_labels;
  for (const auto& label : domain_labels) {
    auto it = label_to_index.find(label);
    if (it == label_to_index.end())
      throw StateNotInDomain("domain label '" + label + "' is not a state");
    chain.domain_index.push_back(it->second);
  }

  const int k = chain.k();
  chain.p_D.resize(k, k);
  chain.q.resize(k);
  for (int i = 0; i < k; ++i) {
    double in_domain = 0.0;
    for (int j = 0; j < k; ++j) {
      chain.p_D(i, j) = transition(chain.domain_index[i], chain.domain_index[j]);
      in_domain += chain.p_D(i, j);
    }
    chain.q(i) = 1.0 - in_domain;
    if (chain.q(i) < -tol::row_sum) throw NotStochastic("negative exit rate");
    if (chain.q(i) < 0.0) chain.q(i) = 0.0;
  }

  if (!strongly_connected(chain.p_D))
    throw NotIrreducible("support of p_D is not strongly connected");
  return chain;
}

FiniteChain parse_chain(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("chain file: ") + e.what());
  }
  if (!doc.contains("states") || !doc.contains("transition") || !doc.contains("domain"))
    throw ParseError("chain file must contain 'states', 'transition' and 'domain'");

  std::vector<std::string> states = doc["states"].get<std::vector<std::string>>();
  std::vector<std::string> domain = doc["domain"].get<std::vector<std::string>>();
  const auto& rows = doc["transition"];
  if (!rows.is_array() || rows.size() != states.size())
    throw ParseError("'transition' must have one row per state");
  Mat transition(states.size(), states.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != states.size())
      throw ParseError("transition row " + std::to_string(i) + " has wrong length");
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      if (!rows[i][j].is_number())
        throw ParseError("transition entry at row " + std::to_string(i) + ", col " +
                         std::to_string(j) + " is not a number");
      transition(i, j) = rows[i][j].get<double>();
    }
  }
  return build_chain(transition, states, domain);
}

FiniteChain load_chain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open chain file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_chain(buf.str());
}

double bracket(const Vec& rho, const Vec& f) {
  if (rho.size() != f.size()) throw DimensionMismatch("bracket: size mismatch");
  return rho.dot(f);
}

Vec theta(const FiniteChain& chain, int x, int y) {
  const int k = chain.k();
  if (x < 0 || x >= k || y < 0 || y >= k)
    throw StateNotInDomain("theta: index outside domain");
  Vec t = Vec::Zero(k);
  t(y) += 1.0;
  t(x) -= 1.0;
  return t;
}

Vec project_zero_mean(const Vec& f, const Vec& pi) {
  if (f.size() != pi.size()) throw DimensionMismatch("project_zero_mean: size mismatch");
  return f - Vec::Constant(f.size(), pi.dot(f));
}

Vec project_zero_sum(const Vec& xi, const Vec& pi) {
  if (xi.size() != pi.size()) throw DimensionMismatch("project_zero_sum: size mismatch");
  return xi - xi.sum() * pi;
}

}  // namespace fvlab
