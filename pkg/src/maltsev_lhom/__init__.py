"""List homomorphisms under Maltsev list polymorphisms, with reductions and oracles."""
