# %%
import pandas as pd
orders = pd.read_csv('sales.csv')  # op: read
clients = pd.read_csv('customers.csv')  # op: read
# %%
clients = clients.rename(columns={'name': 'client_name'})  # op: rename
full = pd.merge(orders, clients, on='customer_id')  # op: merge
# %%
full['status'] = full['status'].map(str.upper)  # op: map
full['amount'] = full['amount'].astype('int64')  # op: as_type
full.to_csv('full.csv', index=False)
