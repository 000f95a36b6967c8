"""Tour of the degree threshold for triangle factors in tripartite graphs.

The square grid blow-up sits exactly at minimum partite degree (k-1)t and
still factors; removing one column kills every crossing clique while the
degree stays almost as large.  Random graphs hugging a degree floor show
how quickly factors appear above the gap.
"""

from tilinglab import (count_crossing_cliques, find_factor,
                       random_min_degree, uniform_blowup)


def grid_witnesses(k=3):
    print(f"-- grid blow-ups, k = {k} --")
    for t in (1, 2, 3):
        tight, _ = uniform_blowup(k, k, t)
        short, _ = uniform_blowup(k, k - 1, t)
        res = find_factor(tight)
        print(f"t={t}: square grid  delta*={tight.min_partite_degree()}"
              f"  factor={res.status}")
        print(f"t={t}: short grid   delta*={short.min_partite_degree()}"
              f"  crossing cliques={count_crossing_cliques(short)}")


def random_scan(n=6, trials=8):
    print(f"\n-- random hosts with a degree floor, n = {n} --")
    for floor in range(n // 2, n + 1):
        outcomes = {}
        for seed in range(trials):
            g, _ = random_min_degree(3, n, floor, seed)
            res = find_factor(g)
            outcomes[res.status] = outcomes.get(res.status, 0) + 1
        print(f"floor={floor}: {outcomes}")


if __name__ == "__main__":
    grid_witnesses()
    random_scan()
