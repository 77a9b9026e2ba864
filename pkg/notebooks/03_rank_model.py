"""The probability model: Selmer rank shares and Hasse ratios by height.

Run: python3 notebooks/03_rank_model.py
"""

from ranklab.rank_model import DEFAULT_PARAMS, joint_bernoulli_pair, rank_distribution, rho, theta, theta_zero

# theta_n(X): chance that a curve of height X has Selmer rank n. The shares
# drift toward the limiting densities s_n as X grows.
for X in (1e6, 2.6975e10, 1e16, 1e40):
    row = " ".join(f"{theta(n, X):.6f}" for n in range(1, 6))
    print(f"X = {X:.4g}: theta_1..5 = {row}, rest = {theta_zero(X):.6f}")

# rho_n(X): chance that a Selmer element is a real point (Mordell-Weil)
# rather than a Sha element. It decays slowly with height.
for X in (1e6, 2.675e10, 1e30):
    print(f"X = {X:.4g}: rho_2..5 =", " ".join(f"{rho(n, X):.5f}" for n in range(2, 6)))

# Rank distribution for Selmer rank 4: two symbols with covariance -0.025.
probs, clipped = rank_distribution(4, 2.0125e10)
print("p_4(r) at 2.0125e10:", [round(p, 5) for p in probs], "clipped" if clipped else "")

# Near height 1 rho_4 is 1, where no pair of symbols can have covariance
# -0.025; the joint law then uses the nearest feasible covariance.
print(joint_bernoulli_pair(rho(4, 10.0), DEFAULT_PARAMS.cov11[4]))
