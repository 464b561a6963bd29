// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_DD_ONLINE_HPP
#define DDPGD_DD_ONLINE_HPP

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dd/offline.hpp"
#include "linalg/gmres.hpp"

namespace ddpgd::dd
{

// Restriction of a source subdomain's nodal field onto one interface block of the target.
struct InterfaceMap
{
  std::string source;
  std::string target;
  std::size_t target_block = 0;
  // (node in source mesh, position in the target's trace vector)
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

// Matches every node of block `target_block` of `target` to a node of `source` by coordinate,
// tolerance 1e-9 h. Throws ConfigError when a node has no counterpart.
InterfaceMap BuildInterfaceMap(const Subdomain &source, const Subdomain &target,
                               std::size_t target_block);

struct CachedEvaluation
{
  linalg::Vector u0;
  std::vector<linalg::Vector> uq;
};

struct GlobalSolution
{
  fem::StructuredMesh mesh;
  linalg::Vector field;
  // Local fields and their node numbering in `mesh`.
  std::vector<linalg::Vector> local_fields;
  std::vector<std::vector<std::size_t>> local_to_global;
  // Largest |u_i - u_j| over nodes shared by several subdomains.
  double overlap_mismatch = 0.0;
};

//
// Interface system of the surrogate-based Schwarz method at one parameter value. All
// surrogate tensors are evaluated once at construction; afterwards every operation is a
// linear combination of cached vectors.
//
class SchwarzProblem
{
public:
  SchwarzProblem(std::vector<std::shared_ptr<const SurrogateModel>> models, const ParamValues &mu,
                 linalg::GmresConfig gmres = {});

  std::size_t num_subdomains() const { return models_.size(); }
  const SurrogateModel &model(std::size_t i) const { return *models_[i]; }
  std::size_t index_of(const std::string &id) const;
  const ParamValues &mu() const { return mu_; }
  const linalg::GmresConfig &gmres_config() const { return gmres_; }
  const std::vector<InterfaceMap> &maps() const { return maps_; }
  const CachedEvaluation &cache(std::size_t i) const { return cache_[i]; }

  // Offset of subdomain i's block in the stacked trace vector; offset(num_subdomains()) is
  // the total size.
  std::size_t offset(std::size_t i) const { return offsets_[i]; }
  std::size_t total_interface_size() const { return offsets_.back(); }

  // Nodal field sum_q lambda_q uq(mu) on subdomain j.
  linalg::Vector OperatorApply(std::size_t j, std::span<const double> lambda_j) const;
  // Block i: Lambda_i minus the neighbour fields (without u0) restricted to Gamma_i.
  linalg::Vector InterfaceMatvec(std::span<const double> lambda) const;
  // Block i: neighbour u0(mu) restricted to Gamma_i.
  linalg::Vector InterfaceRhs() const;
  linalg::GmresResult SolveInterface() const;

  // u0 + sum_q lambda_q uq on subdomain i.
  linalg::Vector LocalField(std::size_t i, std::span<const double> lambda) const;
  // Union-mesh field; where subdomains overlap the earlier model in the list wins.
  GlobalSolution Reconstruct(std::span<const double> lambda) const;

private:
  std::vector<std::shared_ptr<const SurrogateModel>> models_;
  ParamValues mu_;
  linalg::GmresConfig gmres_;
  std::vector<InterfaceMap> maps_;
  std::vector<CachedEvaluation> cache_;
  std::vector<std::size_t> offsets_;
  // maps_ index feeding each subdomain's blocks, per subdomain and block.
  std::vector<std::vector<std::size_t>> map_of_block_;
};

// Throws ConfigError unless the model was built for `expected` (same id, rectangle, mesh and
// interface layout) on axes that appear unchanged in `grid`.
void CheckCompatible(const SurrogateModel &model, const Subdomain &expected,
                     const separated::ParamGrid &grid);

// Throws SolverError carrying the residual history when GMRES did not converge.
void RequireConverged(const linalg::GmresResult &r);

}  // namespace ddpgd::dd

#endif  // DDPGD_DD_ONLINE_HPP
