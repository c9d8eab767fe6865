#pragma once

#include "elastowave/analytic.hpp"
#include "elastowave/dof_space.hpp"
#include "elastowave/face_sets.hpp"
#include "elastowave/linear_operator.hpp"
#include "elastowave/materials.hpp"

#include <memory>
#include <string>
#include <vector>

namespace elastowave {

struct PenaltySpec {
  double alpha = 1.0;
  bool operator==(const PenaltySpec&) const = default;
};

/// 2ab / (a + b).
double harmonic_mean(double a, double b);

/// alpha {lambda + 2 mu}_H {N^2 / h}_H over the two sides of a face.
double penalty_value(double p_modulus_plus, double p_modulus_minus, int degree_plus, int degree_minus,
                     double h_plus, double h_minus, const PenaltySpec& spec);

/// Longest element edge per region index.
std::vector<double> region_meshsizes(const HexMesh& mesh);

/// Lumped GLL mass, one entry per DoF: rho w_i w_j w_k det J summed over
/// elements, with an extra 1/c^2 on acoustic spaces.
std::vector<double> assemble_mass(const HexMesh& mesh, const DofSpace& space, const MaterialTable& materials);

struct StiffnessParts {
  bool volume = true;
  bool consistency = true;  ///< the two average-jump terms
  bool penalty = true;
};

/// SIPG elastic stiffness, applied matrix-free with sum factorization.
/// Face terms act on the mortar pairs between elastic regions.
class ElasticStiffness final : public LinearOperator {
 public:
  ElasticStiffness(std::shared_ptr<const HexMesh> mesh, std::shared_ptr<const DofSpace> space,
                   const MaterialTable& materials, std::vector<MortarPair> internal, const PenaltySpec& penalty,
                   StiffnessParts parts = {});
  ~ElasticStiffness() override;

  int rows() const override { return space_->size(); }
  int cols() const override { return space_->size(); }
  void apply(std::span<const double> x, std::span<double> y) const override;

  const std::vector<double>& penalties() const { return eta_; }

 private:
  struct FaceSide {
    int element;
    std::size_t basis;  ///< offset into face_basis_: values, then 3 gradient blocks
  };
  struct FacePoint {
    double weight;
    Vec3 normal;
    int pair;
    FaceSide side[2];
  };

  void apply_faces(std::span<const double> x, std::span<double> y) const;

  std::shared_ptr<const HexMesh> mesh_;
  std::shared_ptr<const DofSpace> space_;
  StiffnessParts parts_;
  std::vector<double> lambda_;
  std::vector<double> mu_;
  std::vector<double> weighted_det_;
  std::vector<double> eta_;
  std::vector<std::array<int, 2>> pair_elements_;
  std::vector<FacePoint> face_points_;
  std::vector<double> face_basis_;
  mutable std::vector<double> buffer_;
};

/// (rho_a grad phi, grad psi), matrix-free.
class AcousticStiffness final : public LinearOperator {
 public:
  AcousticStiffness(std::shared_ptr<const HexMesh> mesh, std::shared_ptr<const DofSpace> space,
                    const MaterialTable& materials);

  int rows() const override { return space_->size(); }
  int cols() const override { return space_->size(); }
  void apply(std::span<const double> x, std::span<double> y) const override;

 private:
  std::shared_ptr<const HexMesh> mesh_;
  std::shared_ptr<const DofSpace> space_;
  std::vector<double> density_;
  std::vector<double> weighted_det_;
  mutable std::vector<double> buffer_;
};

struct CouplingMatrices {
  CsrMatrix elastic;   ///< C_e: elastic rows, acoustic columns
  CsrMatrix acoustic;  ///< C_a = -C_e^T
};

/// (C_e psi) . v = <rho_a psi n_e, v> over the interface mortar pairs.
CouplingMatrices assemble_coupling(const HexMesh& mesh, const DofSpace& elastic, const DofSpace& acoustic,
                                   std::span<const MortarPair> pairs, const MaterialTable& materials);

struct AbsorbingMatrices {
  CsrMatrix elastic;   ///< rho (c_P n n^T + c_S (I - n n^T)) per face node
  CsrMatrix acoustic;  ///< rho_a / c per face node
};

/// Dissipative first-order absorbing terms on the faces tagged ABS, with GLL
/// face quadrature (3x3 blocks per node, no coupling between nodes).
AbsorbingMatrices assemble_absorbing(const HexMesh& mesh, const DofSpace& elastic, const DofSpace& acoustic,
                                     const FaceSets& faces, const MaterialTable& materials);

/// Operators of M a + S v + K u + C psi = f. Null operators act as zero.
struct SystemOperators {
  std::vector<double> mass_e;
  std::vector<double> mass_a;
  std::shared_ptr<const LinearOperator> stiffness_e;
  std::shared_ptr<const LinearOperator> stiffness_a;
  std::shared_ptr<const LinearOperator> absorbing_e;
  std::shared_ptr<const LinearOperator> absorbing_a;
  std::shared_ptr<const LinearOperator> coupling_e;
  std::shared_ptr<const LinearOperator> coupling_a;

  int elastic_size() const { return static_cast<int>(mass_e.size()); }
  int acoustic_size() const { return static_cast<int>(mass_a.size()); }
};

/// Right-hand sides f_e(t), f_a(t): analytic Neumann data and point Ricker
/// sources. Setup precomputes every quadrature point; evaluate() does not
/// allocate.
class LoadAssembler {
 public:
  LoadAssembler() = default;
  LoadAssembler(const HexMesh& mesh, const DofSpace& elastic, const DofSpace& acoustic, const FaceSets& faces,
                const MaterialTable& materials, std::shared_ptr<const AnalyticModel> model,
                std::vector<RickerSource> sources);

  void evaluate(double t, std::span<double> f_e, std::span<double> f_a) const;
  bool empty() const { return elastic_neumann_.empty() && acoustic_neumann_.empty() && sources_.empty(); }

  struct SourceWeights {
    RickerSource source;
    std::vector<std::pair<int, double>> node_weights;  ///< (node, basis value)
  };
  const std::vector<SourceWeights>& sources() const { return sources_; }

 private:
  struct ElasticFacePoint {
    int node;
    Vec3 x;
    Vec3 normal;
    double weight;
    ElasticMaterial material;
  };
  struct AcousticFacePoint {
    int node;
    Vec3 x;
    Vec3 normal;
    double weight;  ///< includes rho_a
  };

  std::shared_ptr<const AnalyticModel> model_;
  std::vector<ElasticFacePoint> elastic_neumann_;
  std::vector<AcousticFacePoint> acoustic_neumann_;
  std::vector<SourceWeights> sources_;
};

struct DiscretizationOptions {
  /// Polynomial degree per region id; missing regions fall back to the
  /// region's degree, then to 2.
  std::map<int, int> degrees;
  PenaltySpec penalty;
  int mortar_order = 0;
  BoundarySpec boundary;
};

/// Mesh, spaces, face sets and operators of one problem.
struct Discretization {
  std::shared_ptr<const HexMesh> mesh;
  MaterialTable materials;
  FaceSets faces;
  std::shared_ptr<const DofSpace> elastic;
  std::shared_ptr<const DofSpace> acoustic;
  SystemOperators operators;
  PenaltySpec penalty;
  std::vector<double> meshsize;         ///< per region index
  std::vector<double> internal_penalty;  ///< eta per faces.elastic_internal pair
  std::vector<std::string> warnings;
};

Discretization build_discretization(HexMesh mesh, MaterialTable materials, const DiscretizationOptions& options);

}  // namespace elastowave
