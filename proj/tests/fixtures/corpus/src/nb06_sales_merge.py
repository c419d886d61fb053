# %%
import pandas as pd
# %%
sales = pd.read_csv('sales.csv')  # op: read
customers = pd.read_csv('customers.csv')  # op: read
# %%
merged = sales.merge(customers, on='customer_id', how='left')  # op: merge
merged['order_date'] = pd.to_datetime(merged['order_date'])  # op: datetime
merged['segment'] = merged['segment'].fillna('unknown')  # op: fillna
# %% [markdown]
# Revenue per region.
# %%
by_region = merged.groupby('region')['amount'].sum()
by_region.head()
