use dfam_core::eval;
use proptest::prelude::*;

proptest! {
    #[test]
    fn kfold_is_a_partition(n in 2usize..300, k in 2usize..20, seed in any::<u64>()) {
        prop_assume!(k <= n);
        let folds = eval::kfold_split(n, k, seed).unwrap();
        prop_assert_eq!(folds.len(), k);
        let mut seen = vec![0u32; n];
        let sizes: Vec<usize> = folds.iter().map(|f| f.test.len()).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        for f in &folds {
            prop_assert_eq!(f.train.len() + f.test.len(), n);
            for &i in &f.test {
                seen[i] += 1;
                prop_assert!(f.train.binary_search(&i).is_err());
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        prop_assert_eq!(eval::kfold_split(n, k, seed).unwrap(), folds);
    }
}
