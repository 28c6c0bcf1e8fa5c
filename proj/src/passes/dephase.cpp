#include <string>

#include "demeasure/error.hpp"
#include "demeasure/passes.hpp"

namespace demeasure::passes {

ir::Protocol append_dephasing(ir::Protocol p, const std::vector<std::size_t>& qubits,
                              const std::optional<ComplexMatrix>& basis) {
  p.steps.emplace_back(ir::DephaseStep{qubits, basis});
  return p;
}

CompiledArtifact insert_dephasing(CompiledArtifact artifact, const std::vector<std::size_t>& qubits,
                                  const std::optional<ComplexMatrix>& basis) {
  if (qubits.empty()) throw PassError("dephase", "no qubits to dephase");
  for (std::size_t q : qubits) {
    if (q >= artifact.protocol.registers.quantum_count) {
      throw PassError("dephase", "qubit " + std::to_string(q) + " does not exist");
    }
    if (!artifact.ancilla_map.is_ancilla(q)) {
      throw PassError("dephase", "qubit " + std::to_string(q) + " is not an ancilla");
    }
  }
  artifact.protocol = append_dephasing(std::move(artifact.protocol), qubits, basis);
  return artifact;
}

}  // namespace demeasure::passes
